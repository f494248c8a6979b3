"""Spike detection, spike-train lexicon, spiking machines and complexity measures
for extracellular recordings of fungal electrical activity."""

from .complexity import (ComplexityReport, CtmTable, SymbolSequence, bdm, cap_alphabet,
                         complexity_report, lz_complexity, normalize_report, second_order_entropy,
                         shannon_entropy)
from .detect import (DetectorParams, SpikeEvent, SpikeStats, detect_spikes, moving_average,
                     species_preset, spike_stats)
from .lexicon import (Sentence, WordLengthDistribution, fit_power_law, group_words,
                      mean_word_length, theta_for, to_binary_string, word_length_distribution)
from .machine import (FunctionalGraph, TransitionGraph, absorbing_states, attractive_core,
                      build_machine, cycles, filter_graph, leaves, max_transient,
                      stationary_distribution)
from .multichannel import detect_wave_packets, match_spikes, packet_profile
from .recording import ChannelSeries, Recording, load_recording, save_recording, slice_recording
from .synth import SpeciesProfile, generate_burst, generate_recording, species_profile

__version__ = "0.1.0"
