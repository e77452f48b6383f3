#!/usr/bin/env python3
"""End-to-end checks of the ahspec binary: exit codes, schema, determinism, plot data."""

import csv
import io
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

EXE = sys.argv[1]
ROOT = Path(__file__).resolve().parents[2]
SCHEMA = json.loads((ROOT / "schema" / "result_envelope.schema.json").read_text())
failures = []


def run(*args):
    p = subprocess.run([EXE, *args], cwd=ROOT, capture_output=True, text=True, timeout=300)
    return p.returncode, p.stdout, p.stderr


def check(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name + ("" if cond else f"  [{detail}]"))
    if not cond:
        failures.append(name)


def envelope(out_dir):
    env = json.loads((Path(out_dir) / "envelope.json").read_text())
    jsonschema.validate(env, SCHEMA)
    return env


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)

    rc, out, err = run("lambda0", "--metric", "data/metrics/h4.json", "--out", str(tmp / "l0"), "--quiet")
    env = envelope(tmp / "l0")
    lam = env["outputs"]["lambda0"]
    check("lambda0 H4 exit 0", rc == 0, err)
    check("lambda0 H4 = 2.25 +- 1e-3", abs(lam["value"] - 2.25) <= 1e-3 and lam["error"] <= 1e-3, lam)
    check("lambda0 H4 input hashed", env["inputs"][0]["role"] == "metric" and len(env["inputs"][0]["sha1"]) == 40)

    rc, out, err = run("certify", "--metric", "data/metrics/h4.json", "--s", "1.5", "--out", str(tmp / "cert"), "--quiet")
    cert = envelope(tmp / "cert")["outputs"]["certificate"]
    check("certify H4 exit 0", rc == 0, err)
    check("certify H4 bound 2.25", cert["success"] and cert["bound"] == 2.25, cert)

    rc, out, err = run("lambda0", "--metric", "data/metrics/malformed.json", "--out", str(tmp / "bad"), "--quiet")
    env = envelope(tmp / "bad")
    check("malformed metric exit 1", rc == 1, rc)
    check("malformed metric names the field", "/profiles/0/multiplicity" in err and "/profiles/0/multiplicity" in env["error"], err)

    bad_cfg = tmp / "unknown_task.json"
    bad_cfg.write_text(json.dumps({"task": "spectrum-of-everything"}))
    rc, out, err = run("run", "--config", str(bad_cfg))
    check("unknown task exit 1", rc == 1 and "unknown task" in err, err)

    conflict = tmp / "conflict.json"
    conflict.write_text(json.dumps({"task": "certify", "metric": "data/metrics/h4.json", "parameters": {"s": 1.5},
                                    "tolerances": {"solver": 1e-3, "certificate": 1e-6}}))
    rc, out, err = run("run", "--config", str(conflict))
    check("tolerance conflict exit 1", rc == 1 and "conflict" in err, err)

    rc, out, err = run("lambda0", "--metric", "data/metrics/h4.json", "--schedule", "10", "8", "12")
    check("decreasing schedule exit 1", rc == 1 and "/schedule" in err, err)

    rc, out, err = run("lambda0", "--metric", "data/metrics/does_not_exist.json")
    check("missing metric file exit 1", rc == 1, err)

    rc, out, err = run("einstein-shoot", "--param", "-0.1", "--out", str(tmp / "collapse"), "--quiet")
    env = envelope(tmp / "collapse")
    check("collapsing shoot exit 2", rc == 2 and env["status"] == "numerical_diagnostic", err)

    # determinism: same config twice, byte-identical CSV and identical payload
    for d in ("e1", "e2"):
        rc, _, err = run("eigenfunction", "--metric", "data/metrics/h4.json", "--out", str(tmp / d), "--quiet")
        check(f"eigenfunction run {d} exit 0", rc == 0, err)
    a, b = envelope(tmp / "e1"), envelope(tmp / "e2")
    check("eigenfunction CSV byte-identical",
          (tmp / "e1" / "eigenfunction.csv").read_bytes() == (tmp / "e2" / "eigenfunction.csv").read_bytes())
    check("eigenfunction payload identical", a["outputs"] == b["outputs"] and a["series"] == b["series"])
    vl = a["outputs"]["v_limit"]["limit"]["value"]
    gd = a["outputs"]["gradient_defect"]["limit"]["value"]
    check("eigenfunction H4 v -> 1/4, G -> -1", abs(vl - 0.25) <= 1e-3 and abs(gd + 1) <= 1e-3, (vl, gd))

    # the envelope's config reproduces the payload
    replay_cfg = tmp / "replay.json"
    cfg = dict(a["config"])
    cfg["output_dir"] = str(tmp / "replay")
    replay_cfg.write_text(json.dumps(cfg))
    rc, _, err = run("run", "--config", str(replay_cfg), "--quiet")
    c = envelope(tmp / "replay")
    check("replayed config reproduces outputs", rc == 0 and c["outputs"] == a["outputs"] and c["series"] == a["series"], err)

    # plot data
    rc, g_csv, err = run("plot-data", "--envelope", str(tmp / "e1" / "envelope.json"), "--quantity", "G")
    rows = list(csv.reader(io.StringIO(g_csv)))
    check("plot-data G matches stored grid", rc == 0 and rows[0] == ["t", "G"] and len(rows) - 1 == len(a["series"]["G"]["x"]),
          len(rows))
    rc, _, err = run("plot-data", "--envelope", str(tmp / "e1" / "envelope.json"), "--quantity", "lambda0")
    check("plot-data missing quantity names the available ones", rc == 1 and "G, u, v" in err, err)

    rc, _, err = run("run", "--config", "data/configs/sweep.json", "--out", str(tmp / "sweep"), "--quiet")
    check("sweep exit 0", rc == 0, err)
    envelope(tmp / "sweep")
    rc, lam_csv, err = run("plot-data", "--envelope", str(tmp / "sweep" / "envelope.json"), "--quantity", "lambda0")
    rows = list(csv.reader(io.StringIO(lam_csv)))
    xs = [float(r[0]) for r in rows[1:]]
    check("sweep plot-data has error column", rows[0] == ["berger_t", "lambda0", "error"], rows[0])
    check("sweep plot-data abscissa monotone", len(xs) >= 3 and all(x < y for x, y in zip(xs, xs[1:])), xs)

    rc, out, err = run("indicial", "--n", "3", "--kappa", "4", "--s", "1.5")
    env = json.loads(out)
    jsonschema.validate(env, SCHEMA)
    check("indicial roots", rc == 0 and env["outputs"]["roots"] == [-1.0, 4.0] and env["outputs"]["admissible"], out)

    rc, out, err = run("sullivan", "--n", "3", "--d", "2.5")
    check("sullivan", rc == 0 and json.loads(out)["outputs"]["lambda0"] == 1.25, out)

    rc, out, err = run("run", "--config", "data/configs/flow_holder.json", "--out", str(tmp / "flow"), "--quiet")
    env = envelope(tmp / "flow")
    check("flow-check bound holds", rc == 0 and env["outputs"]["bound_holds"], err)

    rc, out, err = run("einstein-shoot", "--param", "-0.05", "--t_max", "16", "--out", str(tmp / "shot"), "--quiet")
    check("einstein-shoot exit 0", rc == 0, err)
    rc, out, err = run("lambda0", "--metric", str(tmp / "shot" / "profile.metric.json"), "--schedule", "10", "12", "14")
    check("shot profile file feeds lambda0", rc == 0 and abs(json.loads(out)["outputs"]["lambda0"]["value"] - 2.25) < 1e-3, err)

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
