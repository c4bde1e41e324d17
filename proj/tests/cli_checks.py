#!/usr/bin/env python3
"""End-to-end checks of the radnas CLI: exit codes, file outputs, determinism."""

import json
import struct
import subprocess
import sys
import tempfile
from pathlib import Path

CLI = sys.argv[1]
FIXTURES = Path(sys.argv[2])

TOY = [
    "--input-size", "16", "--base-channels", "8", "--batch-size", "8",
    "--alpha", "40000",
]

checks = 0


def run(*args, expect=0):
    global checks
    checks += 1
    proc = subprocess.run([CLI, *args], capture_output=True, text=True)
    assert proc.returncode == expect, (
        f"{args}: expected exit {expect}, got {proc.returncode}\n"
        f"stdout: {proc.stdout}\nstderr: {proc.stderr}"
    )
    return proc


def result_without_timing(path):
    data = json.loads(Path(path).read_text())
    data.pop("timing")
    return json.dumps(data, sort_keys=False)


def main():
    tmp = Path(tempfile.mkdtemp(prefix="radnas_cli_"))

    # search: runs, writes the documented artifacts, prints the summary
    out1 = tmp / "run"
    proc = run("search", "--algo", "grave", "--budget", "64", "--seed", "11",
               *TOY, "--out", str(out1))
    assert "params:" in proc.stdout and "violated:" in proc.stdout
    assert (out1 / "result.json").exists()
    assert (out1 / "best_arch.json").exists()
    assert (out1 / "playouts.ndjson").exists()

    result = json.loads((out1 / "result.json").read_text())
    assert result["config"]["seed"] == 11, "resolved config must be embedded"
    assert result["best"]["params"] <= 40000 or result["best"]["violated"]
    assert len(result["commits"]) == 15

    # playout log: one NDJSON record per playout with the documented fields
    lines = (out1 / "playouts.ndjson").read_text().strip().splitlines()
    assert len(lines) == result["playouts_done"]
    rec = json.loads(lines[0])
    for field in ("playout_id", "move_prefix", "params", "raw_score", "reward", "violated"):
        assert field in rec, f"missing field {field}"

    # determinism: identical config and seed, byte-identical modulo timing
    first = result_without_timing(out1 / "result.json")
    run("search", "--algo", "grave", "--budget", "64", "--seed", "11",
        *TOY, "--out", str(out1))
    assert result_without_timing(out1 / "result.json") == first, "seeded rerun differs"

    # the best-architecture document parses and scores
    best = json.loads((out1 / "best_arch.json").read_text())
    assert best["version"] == 1 and "cells" in best
    proc = run("score", "--arch", str(out1 / "best_arch.json"), *TOY, "--seed", "3")
    assert f"params: {result['best']['params']}" in proc.stdout
    assert "kernel (8x8):" in proc.stdout

    # score on the all-identity fixture: identity cells carry nothing, the two
    # skip concatenations leave 3 channels at the head, so params = 3 + 1 = 4
    proc = run("score", "--arch", str(FIXTURES / "all_identity.json"), *TOY, "--seed", "3")
    assert proc.stdout.splitlines()[0] == "params: 4", proc.stdout

    # score the alpha-bound fixture at full scale: prints 120441
    proc = run("score", "--arch", str(FIXTURES / "baseline_unet_120441.json"),
               "--batch-size", "4", "--seed", "3")
    assert proc.stdout.startswith("params: 120441"), proc.stdout

    # compare: budget 0 is a usage error and writes nothing
    out_bad = tmp / "cmp_bad"
    run("compare", "--budget", "0", "--seeds", "2", *TOY, "--out", str(out_bad), expect=2)
    assert not (out_bad / "compare.csv").exists(), "usage error must not write files"

    # compare: writes the per-run CSV and the median summary
    out_cmp = tmp / "cmp"
    run("compare", "--algos", "random,nmcs", "--seeds", "2", "--budget", "48",
        "--seed", "5", *TOY, "--out", str(out_cmp))
    csv_lines = (out_cmp / "compare.csv").read_text().strip().splitlines()
    assert csv_lines[0] == "algorithm,seed,best_params,best_raw_score,violated,playouts,wall_ms"
    assert len(csv_lines) == 1 + 4  # two algorithms x two seeds
    summary = (out_cmp / "summary.csv").read_text()
    assert summary.startswith("algorithm,median_best_params,median_best_raw_score")
    assert "random," in summary and "nmcs," in summary

    # gen: batch file with the documented header plus a manifest
    out_gen = tmp / "gen"
    run("gen", "--scenarios", "1,10", "--count", "4", "--seed", "2", *TOY,
        "--out", str(out_gen))
    manifest = json.loads((out_gen / "manifest.json").read_text())
    assert len(manifest["samples"]) == 4
    assert manifest["config"]["seed"] == 2
    raw = (out_gen / "samples.rdsb").read_bytes()
    magic, version, count, h, w, dtype = struct.unpack("<4sIIIII", raw[:24])
    assert magic == b"RDSB" and version == 1 and count == 4 and h == 16 and w == 16
    assert len(raw) == 24 + count * (h * w * 4 + h * w)

    # config file + flag override
    cfg_path = tmp / "cfg.json"
    cfg_path.write_text(json.dumps({
        "algorithm": "random", "budget": 32, "seed": 21, "input_size": 16,
        "base_channels": 8, "batch_size": 8, "alpha": 40000,
        "macro": {"R": 2, "normals_per_stage": 1, "base_channels": 8},
    }))
    out_cfg = tmp / "cfg_run"
    proc = run("search", "--config", str(cfg_path), "--budget", "16",
               "--out", str(out_cfg))
    result = json.loads((out_cfg / "result.json").read_text())
    assert result["algorithm"] == "random", "config file algorithm applies"
    assert result["config"]["budget"] == 16, "flag overrides the config file"
    assert result["config"]["seed"] == 21

    # malformed architecture document: config error, distinct exit code
    bad_arch = tmp / "bad.json"
    bad_arch.write_text("{ not json")
    run("score", "--arch", str(bad_arch), expect=2)

    # missing file: io error exit code
    run("search", "--config", str(tmp / "missing.json"), expect=2)

    print(f"cli_checks: {checks} invocations checked, all passed")


if __name__ == "__main__":
    main()
