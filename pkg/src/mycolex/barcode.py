"""Bar-code SVG of spike trains: one vertical bar per spike, one strip per channel."""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import quoteattr

from .detect import SpikeEvent

WIDTH = 1000
STRIP_HEIGHT = 60
BAR_TOP = 5
BAR_BOTTOM = 50


def barcode_svg(events: Sequence[SpikeEvent], duration_s: float | None = None,
                channels: Sequence[str] | None = None) -> str:
    """Render spikes as bars at ``x = 1000 * t / duration_s``.

    ``duration_s`` defaults to the latest peak time. Channels with no spikes
    still get a strip when listed in ``channels``.
    """
    if channels is None:
        channels = list(dict.fromkeys(e.channel for e in events)) or [""]
    if duration_s is None:
        duration_s = max((e.peak_time_s for e in events), default=0.0)
    if duration_s <= 0:
        duration_s = 1.0
    height = STRIP_HEIGHT * len(channels)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for k, name in enumerate(channels):
        y0 = k * STRIP_HEIGHT
        out.append(f'<g class="channel" data-channel={quoteattr(name)}>')
        out.append(f'<line class="axis" x1="0" y1="{y0 + BAR_BOTTOM}" x2="{WIDTH}" '
                   f'y2="{y0 + BAR_BOTTOM}" stroke="grey" stroke-width="0.5"/>')
        for e in events:
            if e.channel != name:
                continue
            x = WIDTH * e.peak_time_s / duration_s
            out.append(f'<line class="bar" x1="{x:.3f}" y1="{y0 + BAR_TOP}" x2="{x:.3f}" '
                       f'y2="{y0 + BAR_BOTTOM}" stroke="black" stroke-width="1"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
