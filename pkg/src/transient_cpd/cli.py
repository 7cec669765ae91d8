"""Command-line front end.

Subcommands
-----------
detect         Stream observations from CSV through a detector; NDJSON alarms.
calibrate      Threshold for a target ARL.
arl            Run length at a threshold, analytic and optionally simulated.
tables         Run-length tables (approximations next to simulation) as CSV.
power-curves   Power data series as CSV.
pressure-demo  Synthetic pressure record with embedded tests.

Options may also come from a JSON document given with ``--config``; its keys
are the long option names (``target_arl`` or ``target-arl``) and flags given
on the command line take precedence.

Exit codes: 0 success, 2 configuration error, 3 input parse error,
4 numerical failure.
"""

import argparse
import contextlib
import csv
import json
import math
import sys
import warnings

from . import __version__
from . import arl as _arl
from . import fredholm as _fredholm
from . import montecarlo as _mc
from . import pressure as _pressure
from . import reproduce as _reproduce
from .detectors import CUSUM, MOSUM, FullLikelihoodRatio, GeneralizedMOSUM, ShiryaevRoberts
from .exceptions import ConfigurationError, InputParseError, NumericalError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_NUMERICAL = 4

PROCEDURES = ("cusum", "sr", "mosum", "genmosum", "full-lr")

DEFAULTS = {
    "procedure": "cusum",
    "mu": 0.0,
    "sigma": 1.0,
    "amplitude": 1.0,
    "window": None,
    "threshold": None,
    "target_arl": None,
    "reps": 100_000,
    "seed": 0,
    "input": "-",
    "output": "-",
    "stop_on_first": False,
    "form": "page",
    "method": "auto",
    "table": "all",
    "scenario": "fig8",
    "n_tests": 3,
    "horizon": None,
    "alarms": "-",
    "n_jobs": 1,
}


# -- configuration -----------------------------------------------------------


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigurationError("config must be a JSON object")
    out = {}
    for key, value in doc.items():
        name = key.replace("-", "_")
        if name not in DEFAULTS:
            raise ConfigurationError(f"unknown config key {key!r}")
        out[name] = value
    return out


def _settings(args):
    """Defaults, then the config file, then flags given on the command line."""
    merged = dict(DEFAULTS)
    merged.update(_load_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None and value is not False:
            merged[key] = value
    return argparse.Namespace(**merged)


def parse_window(text):
    """``"L"`` or ``"l0:l1"`` to an int or a pair of ints."""
    if text is None:
        return None
    if isinstance(text, int):
        return text
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return int(text[0]), int(text[1])
    parts = str(text).split(":")
    try:
        nums = [int(p) for p in parts]
    except ValueError as exc:
        raise ConfigurationError(f"window must be 'L' or 'l0:l1'; got {text!r}") from exc
    if len(nums) == 1:
        return nums[0]
    if len(nums) == 2:
        return nums[0], nums[1]
    raise ConfigurationError(f"window must be 'L' or 'l0:l1'; got {text!r}")


def build_detector(cfg):
    """Unfitted detector for the configured procedure."""
    if (cfg.threshold is None) == (cfg.target_arl is None):
        raise ConfigurationError("give exactly one of --threshold and --target-arl")
    proc = cfg.procedure
    window = parse_window(cfg.window)
    common = dict(mu=cfg.mu, sigma=cfg.sigma, threshold=cfg.threshold, target_arl=cfg.target_arl)
    if proc == "cusum":
        return CUSUM(amplitude=cfg.amplitude, form=cfg.form, **common)
    if proc == "sr":
        return ShiryaevRoberts(amplitude=cfg.amplitude, **common)
    if proc == "full-lr":
        return FullLikelihoodRatio(amplitude=cfg.amplitude, random_state=cfg.seed, **common)
    if proc == "mosum":
        if window is None:
            window = 10
        if not isinstance(window, int):
            raise ConfigurationError("mosum needs a single window length L")
        return MOSUM(window=window, **common)
    if proc == "genmosum":
        if window is None:
            window = (1, 10)
        if isinstance(window, int):
            window = (window, window)
        return GeneralizedMOSUM(window[0], window[1], amplitude=cfg.amplitude, random_state=cfg.seed, **common)
    raise ConfigurationError(f"procedure must be one of {PROCEDURES}; got {proc!r}")


# -- I/O ---------------------------------------------------------------------


@contextlib.contextmanager
def _open(path, mode):
    if path in (None, "-"):
        yield sys.stdin if "r" in mode else sys.stdout
    else:
        try:
            fh = open(path, mode, newline="" if "w" in mode else None)
        except OSError as exc:
            raise ConfigurationError(f"cannot open {path}: {exc}") from exc
        with fh:
            yield fh


def _as_number(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("not finite")
    return value


def read_observations(fh):
    """Yield ``(row, label, value)`` from CSV lines one at a time.

    A row is either ``value`` or ``index,value``. The first non-blank row is
    taken as a header when none of its fields is numeric. Blank lines are
    skipped.

    Raises
    ------
    InputParseError
        A row has more than two fields or a value that is not a finite
        number; ``row`` is the 1-based line number.
    """
    first = True
    for row, fields in enumerate(csv.reader(fh), start=1):
        fields = [f.strip() for f in fields]
        if not fields or all(f == "" for f in fields):
            continue
        text = ",".join(fields)
        if first:
            first = False
            if not any(_is_number(f) for f in fields):
                continue
        if len(fields) > 2:
            raise InputParseError(row, text, "expected 'value' or 'index,value'")
        try:
            value = _as_number(fields[-1])
        except ValueError as exc:
            raise InputParseError(row, text, "value is not a finite number") from exc
        yield row, (fields[0] if len(fields) == 2 else None), value


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def _emit(fh, record):
    fh.write(json.dumps(record) + "\n")


# -- commands ----------------------------------------------------------------


def cmd_detect(cfg):
    """Stream observations through the detector; one NDJSON line per alarm."""
    det = build_detector(cfg).fit()
    count = 0
    with _open(cfg.input, "r") as src, _open(cfg.output, "w") as sink:
        for row, label, value in read_observations(src):
            event = det.update(value)
            if event is None:
                continue
            record = event.to_dict()
            record["row"] = row
            if label is not None:
                record["index"] = label
            _emit(sink, record)
            count += 1
            if cfg.stop_on_first:
                break
    return EXIT_OK


def _calibrate_record(cfg, det):
    proc, method = cfg.procedure, cfg.method
    target = float(cfg.target_arl)
    rec = {"procedure": proc, "target_arl": target}
    window = parse_window(cfg.window)
    if window is not None:
        rec["window"] = list(window) if isinstance(window, tuple) else window
    if method == "auto":
        method = "simulation" if proc in ("genmosum", "full-lr") else "analytic"
    if method == "analytic":
        if proc in ("genmosum", "full-lr"):
            raise ConfigurationError(f"{proc} thresholds need --method simulation")
        det = det.fit()
        rec.update(threshold=det.threshold_, method="analytic")
        if proc == "mosum":
            rec["h"] = det.h_
    elif method == "simulation":
        res = _mc.calibrate_threshold(det, target, seed=cfg.seed, reps=cfg.reps, n_jobs=cfg.n_jobs)
        rec.update(
            threshold=res.threshold,
            method="simulation",
            seed_threshold=res.seed_threshold,
            converged=res.converged,
            arl=res.estimate.mean,
            std_error=res.estimate.std_error,
            replicates=res.estimate.replicates,
            seed=cfg.seed,
        )
    else:
        raise ConfigurationError("method must be auto, analytic or simulation")
    return rec


def cmd_calibrate(cfg):
    """Print the threshold for ``--target-arl`` as a JSON object."""
    if cfg.target_arl is None:
        raise ConfigurationError("calibrate needs --target-arl")
    cfg.threshold = None
    det = build_detector(cfg)
    with _open(cfg.output, "w") as sink:
        _emit(sink, _calibrate_record(cfg, det))
    return EXIT_OK


def _analytic_arl(cfg, det):
    proc = cfg.procedure
    a = float(cfg.amplitude) / float(cfg.sigma)
    H = float(cfg.threshold)
    if proc in ("cusum", "sr"):
        # Page's chart is on the log scale; V_n and R_n on the ratio scale
        ratio_H = math.exp(H) if (proc == "cusum" and cfg.form == "page") else H
        return {
            "integral_equation": _fredholm.arl(proc, ratio_H, a),
            "approximation": (_arl.cusum_arl_fast if proc == "cusum" else _arl.sr_arl_fast)(ratio_H, a),
        }
    if proc == "mosum":
        L = det.window
        val = _arl.mosum_arl(H, L, cfg.mu, cfg.sigma) + L
        return {"approximation": val}
    return {}


def cmd_arl(cfg):
    """Run length at ``--threshold`` in observations, as a JSON object."""
    if cfg.threshold is None:
        raise ConfigurationError("arl needs --threshold")
    cfg.target_arl = None
    det = build_detector(cfg).fit()
    rec = {"procedure": cfg.procedure, "threshold": float(cfg.threshold)}
    rec.update(_analytic_arl(cfg, det))
    if cfg.reps:
        plan = _mc.SimulationPlan(det, replicates=int(cfg.reps), seed=int(cfg.seed), n_jobs=int(cfg.n_jobs))
        est = _mc.estimate_arl(plan)
        rec["simulation"] = est.to_dict()
    with _open(cfg.output, "w") as sink:
        _emit(sink, rec)
    return EXIT_OK


def cmd_tables(cfg):
    """Write the requested table(s) as CSV, separated by blank lines."""
    which = _reproduce.TABLE_IDS if str(cfg.table) == "all" else (cfg.table,)
    with _open(cfg.output, "w") as sink:
        for k, t in enumerate(which):
            table = _reproduce.build_table(t, reps=int(cfg.reps), seed=int(cfg.seed), n_jobs=int(cfg.n_jobs))
            if k:
                sink.write("\n")
            sink.write(f"# {table.name}\n")
            table.to_csv(sink)
    return EXIT_OK


def cmd_power_curves(cfg):
    """Write a power data series as CSV."""
    series = _reproduce.build_series(cfg.scenario, reps=int(cfg.reps), seed=int(cfg.seed))
    with _open(cfg.output, "w") as sink:
        series.to_csv(sink)
    return EXIT_OK


def cmd_pressure_demo(cfg):
    """Synthetic record: series CSV to ``--output``, alarms NDJSON to ``--alarms``."""
    window = parse_window(cfg.window) or 75
    if not isinstance(window, int):
        raise ConfigurationError("pressure-demo needs a single window length L")
    target = 5000.0 if cfg.target_arl is None and cfg.threshold is None else cfg.target_arl
    scenario = _pressure.PressureScenario(
        n_tests=int(cfg.n_tests),
        horizon=None if cfg.horizon is None else int(cfg.horizon),
        sigma=float(cfg.sigma),
    )
    try:
        record = _pressure.generate(scenario, seed=int(cfg.seed))
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc
    result = _pressure.run_demo(record, window=window, target_arl=target, threshold=cfg.threshold)
    alarm_rows = {a.n for a in result.alarms}
    with _open(cfg.output, "w") as sink:
        w = csv.writer(sink)
        w.writerow(["t", "z", "cycle", "residual", "statistic", "threshold", "alarm"])
        for t in range(record.z.size):
            stat = result.statistic[t]
            w.writerow(
                [
                    t + 1,
                    f"{record.z[t]:.6f}",
                    f"{record.cycle[t]:.6f}",
                    f"{record.residuals[t]:.6f}",
                    "nan" if math.isnan(stat) else f"{stat:.6f}",
                    f"{result.threshold:.6f}",
                    int(t + 1 in alarm_rows),
                ]
            )
    with _open(cfg.alarms, "w") as sink:
        for k, cluster in enumerate(result.clusters):
            for n in cluster:
                _emit(sink, {"n": n, "cluster": k, "window": window, "threshold": result.threshold})
        _emit(
            sink,
            {
                "summary": True,
                "clusters": len(result.clusters),
                "alarms": len(result.alarms),
                "tests": [list(t) for t in record.tests],
                "length": int(record.z.size),
            },
        )
    return EXIT_OK


COMMANDS = {
    "detect": cmd_detect,
    "calibrate": cmd_calibrate,
    "arl": cmd_arl,
    "tables": cmd_tables,
    "power-curves": cmd_power_curves,
    "pressure-demo": cmd_pressure_demo,
}


# -- parser ------------------------------------------------------------------


def _add_detector_flags(p):
    p.add_argument("--procedure", choices=PROCEDURES)
    p.add_argument("--mu", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--amplitude", type=float)
    p.add_argument("--window", help="MOSUM window 'L' or generalized MOSUM bounds 'l0:l1'")
    p.add_argument("--form", choices=("page", "ratio"), help="CUSUM threshold scale")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--threshold", type=float)
    group.add_argument("--target-arl", dest="target_arl", type=float)


def _add_sim_flags(p):
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--n-jobs", dest="n_jobs", type=int)


def build_parser():
    parser = argparse.ArgumentParser(prog="transient-cpd", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON file with option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect changes in a CSV stream")
    _add_detector_flags(p)
    _add_sim_flags(p)
    p.add_argument("--input", help="CSV file, '-' for stdin")
    p.add_argument("--output", help="NDJSON alarm file, '-' for stdout")
    p.add_argument("--stop-on-first", dest="stop_on_first", action="store_true", default=None)

    p = sub.add_parser("calibrate", help="threshold for a target ARL")
    _add_detector_flags(p)
    _add_sim_flags(p)
    p.add_argument("--method", choices=("auto", "analytic", "simulation"))
    p.add_argument("--output")

    p = sub.add_parser("arl", help="run length at a threshold")
    _add_detector_flags(p)
    _add_sim_flags(p)
    p.add_argument("--output")

    p = sub.add_parser("tables", help="run-length tables as CSV")
    p.add_argument("--table", choices=("1", "2", "3", "4", "5", "all"))
    _add_sim_flags(p)
    p.add_argument("--output")

    p = sub.add_parser("power-curves", help="power data series as CSV")
    p.add_argument("--scenario", choices=_reproduce.FIGURE_IDS)
    _add_sim_flags(p)
    p.add_argument("--output")

    p = sub.add_parser("pressure-demo", help="synthetic pressure record")
    p.add_argument("--window", help="MOSUM window L (default 75)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--threshold", type=float)
    group.add_argument("--target-arl", dest="target_arl", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--n-tests", dest="n_tests", type=int)
    p.add_argument("--horizon", type=int)
    p.add_argument("--output", help="series CSV, '-' for stdout")
    p.add_argument("--alarms", help="NDJSON alarm file, '-' for stdout")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _settings(args)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](cfg)
    except InputParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
