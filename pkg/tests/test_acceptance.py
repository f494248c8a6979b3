"""Acceptance suite: twelve criteria, each printed as one PASS/FAIL line in the
terminal summary (see conftest)."""

import json
import math
import time

import numpy as np
import pytest
from click.testing import CliRunner

from mycolex.cli import main
from mycolex.complexity import CtmTable, bdm, lz_complexity, second_order_entropy, shannon_entropy
from mycolex.detect import species_preset, spike_stats
from mycolex.lexicon import fit_power_law, group_words, mean_word_length, pool_sentences
from mycolex.machine import (FunctionalGraph, TransitionGraph, absorbing_states, cycles,
                             filter_graph, leaves, max_transient)
from mycolex.multichannel import detect_wave_packets
from mycolex.pipeline import detect_recording, tokenize
from mycolex.synth import generate_burst, generate_recording, species_profile
from oracles import (fg_absorbing, fg_cycles, fg_leaves, fg_max_transient, lz76_naive,
                     word_lengths_by_cuts)

SPECIES = ["c_militaris", "f_velutipes", "s_commune", "o_nidiformis"]
SEED = 2024
N_CHANNELS = 2


def match_count(planted, detected, tol):
    """Greedy one-to-one matching of sorted index lists within +-tol samples."""
    hits, j = 0, 0
    for p in planted:
        while j < len(detected) and detected[j] < p - tol:
            j += 1
        if j < len(detected) and abs(detected[j] - p) <= tol:
            hits += 1
            j += 1
    return hits


@pytest.fixture(scope="module")
def species_runs():
    runs = {}
    for name in SPECIES:
        prof = species_profile(name)
        params = species_preset(name)
        t0 = time.perf_counter()
        rec, truth = generate_recording(prof, SEED, n_channels=N_CHANNELS)
        by_channel = detect_recording(rec, params)
        elapsed = time.perf_counter() - t0
        tp = fp = planted = 0
        for ch in rec.channel_names:
            p_idx = [e.peak_index for e in truth if e.channel == ch]
            d_idx = [e.peak_index for e in by_channel[ch]]
            hits = match_count(p_idx, d_idx, 2 * params.w)
            tp, fp, planted = tp + hits, fp + len(d_idx) - hits, planted + len(p_idx)
        runs[name] = dict(profile=prof, by_channel=by_channel, elapsed=elapsed,
                          recall=tp / planted, fp_rate=fp / max(1, tp + fp))
    return runs


def test_c01_detection_recall(species_runs, acceptance_line):
    ok = all(r["recall"] >= 0.8 and r["fp_rate"] <= 0.10 and r["elapsed"] < 30
             for r in species_runs.values())
    detail = "; ".join(f"{n} recall {r['recall']:.3f} fp {r['fp_rate']:.3f} {r['elapsed']:.1f}s"
                       for n, r in species_runs.items())
    assert acceptance_line(1, "detection recall >= 80%, FP <= 10%, < 30 s", ok, detail), detail


def test_c02_statistics_recovery(species_runs, acceptance_line):
    parts, ok = [], True
    for n, r in species_runs.items():
        ev = [e for v in r["by_channel"].values() for e in v]
        isi = np.mean([spike_stats(v).mean_isi_s for v in r["by_channel"].values()])
        amp = spike_stats(ev).mean_amplitude_mv
        e_isi = abs(isi / r["profile"].mean_isi_s - 1)
        e_amp = abs(amp / r["profile"].mean_amplitude_mv - 1)
        ok &= e_isi <= 0.10 and e_amp <= 0.15
        parts.append(f"{n} isi {e_isi:.1%} amp {e_amp:.1%}")
    detail = "; ".join(parts)
    assert acceptance_line(2, "mean ISI within 10%, amplitude within 15%", ok, detail), detail


def test_c03_tokenization_oracle(acceptance_line):
    rng = np.random.default_rng(3)
    bad = 0
    for k in range(10_000):
        n = int(rng.integers(0, 201))
        if k % 2:
            times = np.sort(rng.integers(0, 20 * max(n, 1), n)).astype(float)
            theta = float(rng.integers(1, 40))  # integer grid hits gap == theta often
        else:
            times = np.sort(rng.uniform(0, 1e5, n))
            theta = float(rng.uniform(1, 5000))
        got = list(group_words(times.tolist(), theta).word_lengths)
        bad += got != word_lengths_by_cuts(times, theta)
    assert acceptance_line(3, "group_words equals gap-partition oracle on 10000 lists",
                           bad == 0, f"{bad} mismatches"), bad


def test_c04_machine_oracles(acceptance_line):
    rng = np.random.default_rng(4)
    bad = 0
    for k in range(1000):
        n = int(rng.integers(1, 11))
        states = list(range(1, n + 1))
        succ = {s: int(rng.integers(1, n + 1)) for s in states}
        if k % 5 == 0:  # some partial maps
            for s in states:
                if rng.random() < 0.3:
                    del succ[s]
        f = FunctionalGraph.from_map(succ, states)
        st = set(states)
        same = (leaves(f) == fg_leaves(succ, st) and absorbing_states(f) == fg_absorbing(succ, st)
                and cycles(f) == fg_cycles(succ, st))
        if fg_leaves(succ, st):
            same &= max_transient(f) == fg_max_transient(succ, st)
        bad += not same
    example = cycles(FunctionalGraph.from_map({1: 5, 5: 1, 2: 3, 3: 2}))
    ok = bad == 0 and example == [[1, 5], [2, 3]]
    assert acceptance_line(4, "machine analyses equal path-following oracles", ok,
                           f"{bad} mismatches of 1000; example cycles {example}"), bad


def test_c05_argmax_invariance(acceptance_line):
    rng = np.random.default_rng(5)
    bad = 0
    for _ in range(100):
        n = int(rng.integers(2, 16))
        counts = {}
        for _ in range(int(rng.integers(1, 60))):
            counts[(int(rng.integers(1, n + 1)), int(rng.integers(1, n + 1)))] = int(rng.integers(1, 6))
        base = filter_graph(TransitionGraph.from_counts(counts))
        for k in (2, 10, 1000):
            scaled = TransitionGraph.from_counts({e: c * k for e, c in counts.items()})
            bad += filter_graph(scaled) != base
    assert acceptance_line(5, "filter_graph invariant under count scaling", bad == 0,
                           f"{bad} changed of 300"), bad


def test_c06_entropy_bounds(acceptance_line):
    rng = np.random.default_rng(6)
    bad = 0
    for _ in range(1000):
        k = int(rng.integers(1, 10))
        n = int(rng.integers(2, 300))
        if rng.random() < 0.5:
            s = rng.integers(1, k + 1, n).tolist()
        else:  # skewed distributions and Markov-like runs
            p = rng.dirichlet(np.full(k, 0.3))
            s = rng.choice(np.arange(1, k + 1), n, p=p).tolist()
        h1, h2 = shannon_entropy(s), second_order_entropy(s)
        a = len(set(s))
        ok = (-1e-9 <= h1 <= math.log2(a) + 1e-9) and (h1 - 1e-9 <= h2 <= 2 * h1 + 1e-9)
        bad += not ok
    uniform = shannon_entropy([1, 2, 3, 4] * 25)
    ok = bad == 0 and uniform == 2.0
    assert acceptance_line(6, "0 <= H1 <= log2|A|, H1 <= H2 <= 2 H1; uniform H1 = 2", ok,
                           f"{bad} violations; uniform {uniform!r}"), bad


def test_c07_lz_oracle(acceptance_line):
    rng = np.random.default_rng(7)
    bad = 0
    for _ in range(5000):
        k = int(rng.integers(2, 10))
        s = rng.integers(0, k, int(rng.integers(1, 65))).tolist()
        bad += lz_complexity(s)[0] != lz76_naive(s)
    assert acceptance_line(7, "LZ76 phrases equal naive oracle on 5000 strings", bad == 0,
                           f"{bad} mismatches"), bad


CTM5 = CtmTable.from_entries({(1, 2): 3.5, (2, 1): 4.25, (1, 1): 2.0, (2, 2): 2.5, (1, 3): 6.125})
L3 = math.log2(3)
BDM_CASES = [
    ([1, 2], 3.5),
    ([1, 2] * 4, 3.5 + 2.0),
    ([1, 2, 2, 1], 3.5 + 4.25),
    ([1, 1, 2, 2, 1, 3], 2.0 + 2.5 + 6.125),
    ([1, 2, 1, 2, 2, 1], 3.5 + 1.0 + 4.25),
    ([2, 1] * 2, 4.25 + 1.0),
    ([1, 3] * 8, 6.125 + 3.0),
    ([1, 1] * 3, 2.0 + L3),
    ([1, 2, 1, 2, 1, 1, 2, 2], 3.5 + 1.0 + 2.0 + 2.5),
    ([1, 2, 1], 3.5),
    ([2, 2] * 4 + [1, 3], 2.5 + 2.0 + 6.125),
    ([1, 1, 1, 2, 2, 1, 2, 2, 1, 3], 2.0 + 3.5 + 4.25 + 2.5 + 6.125),
    ([2, 1, 2, 1, 1, 2, 1, 2], 4.25 + 1.0 + 3.5 + 1.0),
    ([1, 3, 1, 3, 2, 2], 6.125 + 1.0 + 2.5),
    ([1, 2] * 4 + [2, 1] * 4, 3.5 + 2.0 + 4.25 + 2.0),
    ([1, 1] * 2 + [2, 2] * 2 + [1, 3], 2.0 + 1.0 + 2.5 + 1.0 + 6.125),
    ([2, 2], 2.5),
    ([1, 2] * 3 + [2, 1], 3.5 + L3 + 4.25),
    ([1, 3] * 2 + [1, 1] * 4, 6.125 + 1.0 + 2.0 + 2.0),
    ([1, 2, 2, 1, 1, 1, 2, 2, 1, 3, 1], 3.5 + 4.25 + 2.0 + 2.5 + 6.125),
]


def test_c08_bdm_formula(acceptance_line):
    errs = [abs(bdm(s, CTM5) - want) for s, want in BDM_CASES]
    mult4 = bdm([1, 2] * 4, CTM5) - bdm([1, 2], CTM5)
    ok = max(errs) <= 1e-12 and mult4 == 2.0 and len(BDM_CASES) == 20
    assert acceptance_line(8, "BDM equals hand-computed sums within 1e-12", ok,
                           f"max error {max(errs):.1e}; multiplicity-4 adds {mult4!r}"), errs


def test_c09_power_law_fit(acceptance_line):
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(50):
        a, c = rng.uniform(1, 50), rng.uniform(-2, -0.1)
        f = fit_power_law({l: a * l ** c for l in range(1, 13)})
        worst = max(worst, abs(f.coefficient - a), abs(f.exponent - c))
    assert acceptance_line(9, "power-law fit recovers (A, c) within 1e-6", worst <= 1e-6,
                           f"max error {worst:.1e}"), worst


def test_c10_word_length_plausibility(species_runs, acceptance_line):
    parts, ok = [], True
    for n, r in species_runs.items():
        sentences = tokenize(r["by_channel"], 1, pooled=True)
        m = mean_word_length(pool_sentences(sentences))
        ok &= 3 <= m <= 10
        parts.append(f"{n} {m:.2f}")
    detail = "; ".join(parts)
    assert acceptance_line(10, "pooled mean word length at theta=a in [3, 10]", ok, detail), detail


def test_c11_wave_packet(acceptance_line):
    name = "f_velutipes"
    rec, truth = generate_burst(species_profile(name), 12, 1200.0, SEED,
                                burst_amplitude_mv=2.1, burst_amplitude_stddev_mv=0.1)
    events = detect_recording(rec, species_preset(name))["ch0"]
    packets = detect_wave_packets(events, packet_isi_s=2400.0)
    ok = len(packets) == 1 and packets[0].n_spikes == 12
    amp = float(np.mean(packets[0].amplitudes_mv)) if packets else float("nan")
    ok = ok and abs(amp / 2.1 - 1) <= 0.10
    detail = f"{len(packets)} packet(s), sizes {[p.n_spikes for p in packets]}, mean amp {amp:.3f} mV"
    assert acceptance_line(11, "12-spike burst recovered as one packet, amplitude within 10%",
                           ok, detail), detail


def test_c12_report_determinism(tmp_path, acceptance_line):
    runner = CliRunner()
    outputs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        res = runner.invoke(main, ["synth", "--species", "s_commune", "--seed", "12",
                                   "--channels", "2", "-o", str(d)])
        assert res.exit_code == 0, res.output
        res = runner.invoke(main, ["report", str(d / "recording.csv"), "--species", "s_commune",
                                   "-o", str(d / "report.json")])
        assert res.exit_code == 0, res.output
        outputs.append((d / "report.json").read_bytes())
    ok = outputs[0] == outputs[1] and len(json.loads(outputs[0])["theta"]) == 2
    assert acceptance_line(12, "report is byte-identical across runs", ok,
                           f"{len(outputs[0])} bytes"), "reports differ"
