#!/usr/bin/env python3
"""Regenerates the shipped SoC, workload and DSE configs under data/."""

import copy
import json
import pathlib

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"

BIG_OPPS = [(600, 0.90), (800, 0.925), (1000, 0.95), (1200, 1.0),
            (1400, 1.05), (1600, 1.1125), (1800, 1.2), (2000, 1.3)]
LITTLE_OPPS = [(600, 0.90), (800, 0.95), (1000, 1.0), (1200, 1.1), (1400, 1.2)]

# Microseconds at the top OPP.
A15 = {
    "tx_scrambler_encoder": 10, "tx_interleaver": 4, "tx_qpsk_mod": 8, "tx_pilot_insertion": 3,
    "tx_ifft": 118, "tx_crc": 3,
    "rx_match_filter": 5, "rx_payload_extraction": 4, "rx_fft": 115, "rx_pilot_extraction": 3,
    "rx_qpsk_demod": 95, "rx_deinterleaver": 9, "rx_decoder": 738, "rx_descrambler": 2,
    "pd_fft": 15, "pd_vector_mult": 35, "pd_ifft": 15, "pd_amplitude": 40, "pd_fft_shift": 3,
    "rd_lfm_gen": 60, "rd_fft": 60, "rd_vector_mult": 60, "rd_ifft": 60, "rd_detection": 20,
    # Single-carrier profiles are illustrative.
    "sc_tx_encoder": 5, "sc_tx_modulation": 8, "sc_tx_pulse_shaping": 20, "sc_tx_crc": 3,
    "sc_rx_match_filter": 6, "sc_rx_demodulation": 10, "sc_rx_decoder": 25, "sc_rx_descrambler": 2,
}
A7 = {
    "tx_scrambler_encoder": 22, "tx_interleaver": 10, "tx_qpsk_mod": 15, "tx_pilot_insertion": 5,
    "tx_ifft": 296, "tx_crc": 5,
    "rx_match_filter": 16, "rx_payload_extraction": 8, "rx_fft": 290, "rx_pilot_extraction": 5,
    "rx_qpsk_demod": 191, "rx_deinterleaver": 16, "rx_decoder": 1828, "rx_descrambler": 3,
    "pd_fft": 35, "pd_vector_mult": 100, "pd_ifft": 35, "pd_amplitude": 70, "pd_fft_shift": 7,
    "rd_lfm_gen": 90, "rd_fft": 150, "rd_vector_mult": 75, "rd_ifft": 150, "rd_detection": 20,
    "sc_tx_encoder": 10, "sc_tx_modulation": 16, "sc_tx_pulse_shaping": 45, "sc_tx_crc": 5,
    "sc_rx_match_filter": 12, "sc_rx_demodulation": 22, "sc_rx_decoder": 55, "sc_rx_descrambler": 3,
}
FFT_ACC = {"tx_ifft": 16, "rx_fft": 12, "pd_fft": 6, "pd_ifft": 6, "rd_fft": 30, "rd_ifft": 30}
VITERBI_ACC = {"rx_decoder": 2}
SCRAMBLER_ACC = {"tx_scrambler_encoder": 8}


def opps(table):
    return [{"voltage_v": v, "frequency_mhz": f} for f, v in table]


def core(pid, name, subtype, cluster, table, profile, power, area, policy):
    return {
        "id": pid, "name": name, "type": "general-core", "subtype": subtype, "cluster": cluster,
        "capacity": 1, "opps": opps(table), "latency_profile_us": profile, "power": power,
        "area_mm2": area, "dvfs_policy": policy,
    }


def accel(pid, name, subtype, profile, power, area):
    return {
        "id": pid, "name": name, "type": "accelerator", "subtype": subtype, "capacity": 1,
        "opps": [{"voltage_v": 1.0, "frequency_mhz": 500}], "latency_profile_us": profile,
        "power": power, "area_mm2": area, "dvfs_policy": "performance",
    }


BIG_POWER = {"cap_f": 4.0e-10, "activity": 0.8, "leak_a": 0.0010, "leak_b": 0.050}
LITTLE_POWER = {"cap_f": 1.48e-10, "activity": 0.5, "leak_a": 0.0002, "leak_b": 0.010}
FFT_POWER = {"cap_f": 1.0e-10, "activity": 1.0, "leak_a": 0.0, "leak_b": 0.004}
VITERBI_POWER = {"cap_f": 0.8e-10, "activity": 1.0, "leak_a": 0.0, "leak_b": 0.003}
SCRAMBLER_POWER = {"cap_f": 0.4e-10, "activity": 1.0, "leak_a": 0.0, "leak_b": 0.002}

AREA = {"big": 0.9, "little": 0.25, "fft": 0.37, "viterbi": 0.27, "scrambler": 0.1}
UNCORE = 10.34  # 4 big + 4 LITTLE + uncore = 14.94 mm^2

NOC = {
    "bandwidth_bytes_per_us": 128.0,
    "link_capacity": 8.0,
    "load_latency_us": [[0.0, 0.0], [0.5, 0.5], [0.8, 2.0], [1.0, 5.0]],
}
# Flat 50 ns up to 80% of a 12.8 GB/s peak, then a knee to 400 ns.
DRAM = {"window_us": 100.0, "bandwidth_latency_ns": [[0.0, 50.0], [10.24, 50.0], [12.8, 400.0]]}
THERMAL = {"r_k_per_w": 12.0, "c_j_per_k": 0.1, "ambient_c": 25.0, "trip_c": 95.0, "hysteresis_c": 5.0}


def soc(name, n_big=4, n_little=4, n_scrambler=0, n_fft=0, n_viterbi=0, policy="performance"):
    pes = []
    for i in range(n_big):
        pes.append(core(len(pes), f"A15_{i}", "big-core", "big", BIG_OPPS, A15, BIG_POWER, AREA["big"], policy))
    for i in range(n_little):
        pes.append(core(len(pes), f"A7_{i}", "little-core", "little", LITTLE_OPPS, A7, LITTLE_POWER,
                        AREA["little"], policy))
    for i in range(n_scrambler):
        pes.append(accel(len(pes), f"SCR_{i}", "scrambler-acc", SCRAMBLER_ACC, SCRAMBLER_POWER, AREA["scrambler"]))
    for i in range(n_fft):
        pes.append(accel(len(pes), f"FFT_{i}", "fft-acc", FFT_ACC, FFT_POWER, AREA["fft"]))
    for i in range(n_viterbi):
        pes.append(accel(len(pes), f"VIT_{i}", "viterbi-acc", VITERBI_ACC, VITERBI_POWER, AREA["viterbi"]))
    return {
        "name": name, "pes": pes, "noc": copy.deepcopy(NOC), "dram": copy.deepcopy(DRAM),
        "uncore_area_mm2": UNCORE, "dtpm_epoch_us": 20000.0, "thermal": copy.deepcopy(THERMAL),
    }


CANONICAL_COSTS = [
    (14, 16, 9), (13, 19, 18), (11, 13, 19), (13, 8, 17), (12, 13, 10),
    (13, 16, 9), (7, 15, 11), (5, 11, 14), (18, 12, 29), (21, 7, 16),
]


def canonical_soc():
    pes = []
    for p in range(3):
        profile = {f"canonical_t{t}": CANONICAL_COSTS[t][p] for t in range(10)}
        pes.append({
            "id": p, "name": f"P{p}", "type": "general-core", "subtype": "generic", "cluster": f"P{p}",
            "capacity": 1, "opps": [{"voltage_v": 1.0, "frequency_mhz": 1000}],
            "latency_profile_us": profile,
            "power": {"cap_f": 1.0e-10, "activity": 1.0, "leak_a": 0.0, "leak_b": 0.01},
            "area_mm2": 1.0, "dvfs_policy": "performance",
        })
    # One byte per microsecond and no load term: an edge of cost c takes c us.
    return {
        "name": "canonical-3pe", "pes": pes,
        "noc": {"bandwidth_bytes_per_us": 1.0, "link_capacity": 8.0, "load_latency_us": [[0.0, 0.0]]},
        "dram": {"window_us": 100.0, "bandwidth_latency_ns": [[0.0, 0.0]]},
        "uncore_area_mm2": 0.0, "dtpm_epoch_us": 20000.0,
    }


TABLE6 = [(1, 0, 0), (2, 0, 1), (3, 2, 1), (4, 4, 0), (5, 4, 1), (6, 6, 3)]
TABLE6_WORKLOAD = {
    "mixture": {"wifi-tx": 0.2, "wifi-rx": 0.8},
    "rate_jobs_per_ms": 3.0,
    "jobs": 600,
    "seed": 42,
}


def write(rel, obj):
    path = DATA / rel
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2) + "\n")


def main():
    write("soc16.json", soc("soc16", n_scrambler=2, n_fft=4, n_viterbi=2))
    write("canonical_soc.json", canonical_soc())

    hot = soc("soc-hot", n_big=4, n_little=0, policy="performance")
    hot["thermal"]["zones"] = {"big": {"r_k_per_w": 40.0, "c_j_per_k": 0.02}}
    write("soc_hot.json", hot)

    for cid, fft, vit in TABLE6:
        write(f"table6/config{cid}.json", soc(f"config-{cid}", n_fft=fft, n_viterbi=vit))
    write("table6/workload.json", TABLE6_WORKLOAD)
    write("table6/grid.json", {
        "base": "config1.json",
        "workload": "workload.json",
        "scheduler": "etf",
        "seeds": 1,
        "templates": "candidates.json",
        "cells": [{"name": f"config-{cid}", "counts": {"fft-acc": fft, "viterbi-acc": vit}}
                  for cid, fft, vit in TABLE6],
    })
    write("table6/candidates.json", {
        "candidates": [
            {"subtype": "fft-acc", "template": accel(0, "FFT", "fft-acc", FFT_ACC, FFT_POWER, AREA["fft"]),
             "max_count": 6},
            {"subtype": "viterbi-acc",
             "template": accel(0, "VIT", "viterbi-acc", VITERBI_ACC, VITERBI_POWER, AREA["viterbi"]),
             "max_count": 3},
        ],
        "utilization_threshold": 0.60,
        "blocking_threshold": 0.30,
        "budget": 10,
    })

    write("table6/grid_full.json", {
        "base": "config1.json",
        "workload": "workload.json",
        "scheduler": "etf",
        "templates": "candidates.json",
        "axes": {"fft-acc": [0, 1, 2, 4, 6], "viterbi-acc": [0, 1, 2, 3]},
    })
    write("dvfs_grid.json", {
        "base": "soc16.json",
        "workload": "workloads/dtpm.json",
        "scheduler": "etf",
        "dvfs": {"include_governors": True, "min_big": 1, "min_little": 1},
    })

    write("workloads/fig11a.json", {"mixture": {"wifi-tx": 0.2, "wifi-rx": 0.8},
                                    "rate_jobs_per_ms": 1.0, "jobs": 500, "seed": 7})
    write("workloads/fig11b.json", {"mixture": {"wifi-tx": 0.8, "wifi-rx": 0.2},
                                    "rate_jobs_per_ms": 1.0, "jobs": 500, "seed": 7})
    write("workloads/fig11c.json", {"mixture": {"range-detection": 0.8, "pulse-doppler": 0.2},
                                    "rate_jobs_per_ms": 1.0, "jobs": 300, "seed": 7})
    write("workloads/fig11d.json", {"mixture": {"wifi-tx": 0.3, "wifi-rx": 0.3, "range-detection": 0.3,
                                                "pulse-doppler": 0.1},
                                    "rate_jobs_per_ms": 1.0, "jobs": 300, "seed": 7})
    write("workloads/dtpm.json", {"mixture": {"wifi-tx": 0.25, "wifi-rx": 0.25, "sc-tx": 0.2, "sc-rx": 0.2,
                                              "range-detection": 0.1},
                                  "rate_jobs_per_ms": 2.0, "jobs": 400, "seed": 11})
    write("workloads/thermal.json", {"mixture": {"wifi-rx": 1.0}, "rate_jobs_per_ms": 1.5,
                                     "duration_us": 2000000.0, "seed": 5})


if __name__ == "__main__":
    main()
