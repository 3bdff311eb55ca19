"""End-to-end checks of the command-line tool: examples, determinism, exit codes and schemas.

usage: test_cli.py BINARY SCHEMA_DIR
"""
import csv
import json
import pathlib
import subprocess
import sys
import tempfile
import unittest

from jsonschema import Draft202012Validator

BIN = SCHEMAS = None
TMP = pathlib.Path(tempfile.mkdtemp(prefix="bayescomp-cli-"))


def run(*args, code=0):
    p = subprocess.run([BIN, *map(str, args)], capture_output=True, text=True)
    if p.returncode != code:
        raise AssertionError(f"{args}: exit {p.returncode} (wanted {code})\n{p.stderr}")
    return p.stdout


def synth(kind, path, seed, *extra):
    run("--seed", seed, "synth", kind, "--out", path, *extra)
    return path


def rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def setUpModule():
    synth("regression", TMP / "reg.csv", 1)
    synth("mixture", TMP / "mix.csv", 1)
    synth("ar", TMP / "ar.csv", 1, "--n", 150)
    synth("ma", TMP / "ma.csv", 1, "--n", 80, "--coefficients", "0.6,0.2")
    with open(TMP / "small.csv", "w") as f:
        f.write("x\n1\n2\n3\n2\n")
    with open(TMP / "glm.csv", "w") as f:
        f.write("x,y\n")
        for i, y in enumerate([0, 0, 1, 0, 1, 0, 1, 1, 0, 1, 1, 1]):
            f.write(f"{(i - 6) / 3},{y}\n")
    # Potts observations as a whitespace grid
    p = rows(synth("potts", TMP / "potts.csv", 2, "--rows", 6, "--cols", 6))
    grid = [[""] * 6 for _ in range(6)]
    for r in p:
        grid[int(r["row"]) - 1][int(r["col"]) - 1] = r["observation"]
    (TMP / "img.txt").write_text("\n".join(" ".join(g) for g in grid) + "\n")


# (schema name, argv) for every JSON-emitting command
COMMANDS = [
    ("dist", ["--seed", 1, "dist", "--family", "gamma", "--param", "2,3", "--at", "0.5,1", "--quantile", "0.5",
              "--draws", 50]),
    ("conjugate-nig", ["conjugate", "nig", "--data", "{small}"]),
    ("conjugate-expfam", ["conjugate", "expfam", "--family", "poisson", "--data", "{small}", "--xi", 1]),
    ("mc-two-sample-bf", ["--seed", 1, "mc", "two-sample-bf", "--n", 100, "--xbar", 0.088, "--ybar", 0.1078, "--s2", 0.00875,
                  "--N", 10000]),
    ("mc-accept-reject", ["--seed", 1, "mc", "accept-reject", "--target", "beta:2.7,6.3", "--proposal", "beta:2,6",
                          "--log-bound", 0.6, "--n", 200]),
    ("mc-importance", ["--seed", 1, "mc", "importance", "--target", "normal:0,1", "--proposal", "cauchy:0,1",
                       "--n", 1000]),
    ("mc-bridge", ["--seed", 1, "mc", "bridge", "--first", "normal:0,1", "--second", "normal:0.2,1.5", "--n", 500]),
    ("mc-slice", ["--seed", 1, "mc", "slice", "--target", "beta:2,3", "--start", 0.5, "--n", 500]),
    ("reg", ["reg", "--data", "{reg}", "--x", "x", "--prior", "g", "--select", 1]),
    ("glm", ["--seed", 1, "--iters", 600, "--burnin", 100, "glm", "--data", "{glm}", "--x", "x", "--intercept",
             "--method", "gibbs"]),
    ("capture-darroch", ["capture", "darroch", "--n1", 20, "--n2", 30, "--m2", 5]),
    ("capture-tag", ["capture", "tag", "--n1plus", 32, "--recoveries", "20,8,5,1,2,0,2,1,1,0"]),
    ("capture-posterior", ["capture", "posterior", "--captures", "20,30,25", "--recaptures", "5,10"]),
    ("capture-gibbs", ["--seed", 1, "--iters", 500, "--burnin", 50, "capture", "gibbs", "--captures", "20,30",
                       "--recaptures", 5]),
    ("mix-em", ["--seed", 1, "mix", "em", "--data", "{mix}", "--starts", 3]),
    ("mix-gibbs", ["--seed", 1, "--iters", 200, "--burnin", 20, "mix", "gibbs", "--data", "{mix}",
                   "--means", "0,3", "--weights", "0.4,0.6", "--variances", "1.1,0.8"]),
    ("ar-rj", ["--seed", 1, "--iters", 600, "--burnin", 100, "ar", "rj", "--data", "{ar}", "--max-order", 3]),
    ("ar-roots", ["ar", "roots", "--coefficients", "0.5,-0.3"]),
    ("ar-ar1", ["ar", "ar1", "--data", "{ar}"]),
    ("ma-forecast", ["ma", "forecast", "--data", "{ma}", "--coefficients", "0.6,0.2", "--horizon", 3]),
    ("ma-acf", ["ma", "acf", "--coefficients", "0.6,0.2"]),
    ("hmm-filter", ["hmm", "filter", "--data", "{ma}", "--transition", "0.9,0.1;0.2,0.8", "--means", "0,1",
                    "--variances", "1,1"]),
    ("hmm-marginal", ["hmm", "marginal", "--transition", "0.9,0.1;0.2,0.8", "--means", "0,1", "--variances", "1,2"]),
    ("ising-exact", ["ising", "exact", "--rows", 2, "--cols", 3]),
    ("ising-path", ["--seed", 1, "--iters", 300, "--burnin", 50, "ising", "path", "--rows", 2, "--cols", 3,
                    "--points", 5]),
    ("ising-gibbs", ["--seed", 1, "--iters", 50, "--burnin", 10, "ising", "gibbs", "--rows", 4, "--cols", 4]),
    ("ising-segment", ["--seed", 1, "--iters", 100, "--burnin", 20, "ising", "segment", "--image", "{img}",
                       "--means", "1,2", "--variance", 0.25]),
]


def expand(argv):
    files = {k: TMP / f"{k}.csv" for k in ("small", "reg", "mix", "ar", "ma", "glm")}
    files["img"] = TMP / "img.txt"
    return [str(a).format(**files) if isinstance(a, str) else a for a in argv]


class Examples(unittest.TestCase):
    def test_darroch_mean(self):
        r = json.loads(run("capture", "darroch", "--n1", 20, "--n2", 30, "--m2", 5))["result"]
        self.assertAlmostEqual(r["posterior_mean"], 130.91, delta=0.005)
        self.assertEqual(r["mle"], 120)

    def test_darroch_no_recapture(self):
        r = json.loads(run("capture", "darroch", "--n1", 20, "--n2", 30, "--m2", 0))["result"]
        self.assertIsNone(r["mle"])

    def test_two_sample_bf_both_methods(self):
        args = ["mc", "two-sample-bf", "--n", 100, "--xbar", 0.088, "--ybar", 0.1078, "--s2", 0.00875, "--N", 1000000,
                "--seed", 1]
        first = run(*args)
        r = json.loads(first)["result"]
        self.assertLess(abs(r["normal_sim"]["inverse_b10"] - 23.42), 0.5)
        self.assertLess(abs(r["t_sim"]["inverse_b10"] - 23.42), 0.5)
        self.assertEqual(first, run(*args))

    def test_numbers_round_trip(self):
        out = run("capture", "darroch", "--n1", 20, "--n2", 30, "--m2", 5)
        self.assertIn("130.91452099136038", out)


class Determinism(unittest.TestCase):
    def test_every_stochastic_command_repeats(self):
        for name, argv in COMMANDS:
            if "--seed" in argv:
                with self.subTest(name):
                    self.assertEqual(run(*expand(argv)), run(*expand(argv)))

    def test_seed_changes_output(self):
        a = run("--seed", 1, "mc", "slice", "--target", "beta:2,3", "--start", 0.5, "--n", 100)
        b = run("--seed", 2, "mc", "slice", "--target", "beta:2,3", "--start", 0.5, "--n", 100)
        self.assertNotEqual(json.loads(a)["result"], json.loads(b)["result"])

    def test_seed_position_is_free(self):
        self.assertEqual(run("--seed", 3, "mc", "slice", "--target", "beta:2,3", "--start", 0.5, "--n", 100),
                         run("mc", "slice", "--target", "beta:2,3", "--start", 0.5, "--n", 100, "--seed", 3))


class Synth(unittest.TestCase):
    def test_mixture_rows(self):
        self.assertEqual(len(rows(synth("mixture", TMP / "m.csv", 9))), 324)

    def test_regression_shape(self):
        r = rows(synth("regression", TMP / "r.csv", 9))
        self.assertEqual(len(r), 20)
        self.assertEqual(list(r[0]), ["x", "y"])

    def test_seeds_differ(self):
        for kind in ("regression", "mixture", "ar", "ma", "potts"):
            with self.subTest(kind):
                a = pathlib.Path(synth(kind, TMP / "a.csv", 1)).read_text()
                b = pathlib.Path(synth(kind, TMP / "b.csv", 2)).read_text()
                self.assertNotEqual(a, b)

    def test_unknown_generator(self):
        run("--seed", 1, "synth", "nope", code=2)


class ExitCodes(unittest.TestCase):
    def test_missing_seed(self):
        run("mc", "slice", "--target", "beta:2,3", "--start", 0.5, code=2)

    def test_iters_burnin(self):
        run("--seed", 1, "--iters", 10, "--burnin", 10, "ising", "gibbs", code=2)

    def test_bad_family_parameter(self):
        run("dist", "--family", "beta", "--param", "-1,2", code=2)

    def test_data_error_has_line(self):
        bad = TMP / "bad.csv"
        bad.write_text("x,y\n1,2\n3,oops\n")
        p = subprocess.run([BIN, "reg", "--data", bad, "--x", "x"], capture_output=True, text=True)
        self.assertEqual(p.returncode, 3)
        self.assertIn("bad.csv:3", p.stderr)

    def test_ragged_row(self):
        bad = TMP / "ragged.csv"
        bad.write_text("x,y\n1,2\n3\n")
        run("reg", "--data", bad, "--x", "x", code=3)

    def test_numerical_failure(self):
        run("capture", "posterior", "--captures", "20,30", "--recaptures", 0, code=4)

    def test_help(self):
        run("--help")


class Formats(unittest.TestCase):
    def test_csv_format(self):
        out = run("--format", "csv", "ma", "acf", "--coefficients", "0.5")
        self.assertTrue(out.startswith("lag,autocovariance,autocorrelation\n"))

    def test_trace_file(self):
        trace = TMP / "trace.csv"
        run("--seed", 1, "--iters", 30, "--burnin", 5, "--trace", trace, "ising", "gibbs")
        self.assertEqual(len(rows(trace)), 30)


class Schemas(unittest.TestCase):
    def test_every_command_validates(self):
        names = {n for n, _ in COMMANDS}
        shipped = {p.name.removesuffix(".schema.json") for p in pathlib.Path(SCHEMAS).glob("*.schema.json")}
        self.assertEqual(names, shipped)
        for name, argv in COMMANDS:
            with self.subTest(name):
                schema = json.loads((pathlib.Path(SCHEMAS) / f"{name}.schema.json").read_text())
                Draft202012Validator.check_schema(schema)
                doc = json.loads(run(*expand(argv)))
                errors = sorted(Draft202012Validator(schema).iter_errors(doc), key=str)
                self.assertFalse(errors, "\n".join(e.message for e in errors[:5]))


if __name__ == "__main__":
    BIN, SCHEMAS = sys.argv[1], sys.argv[2]
    unittest.main(argv=sys.argv[:1], verbosity=2)
