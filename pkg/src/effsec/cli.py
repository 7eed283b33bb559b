"""Command-line driver: channel files in, CSV results and a JSON run manifest out.

Channel documents are JSON::

    {"x": [0, 1], "y": [0, 1], "z": [0, 1],
     "joint": [[q(y0,z0|x0), q(y0,z1|x0), q(y1,z0|x0), q(y1,z1|x0)], ...]}

with (y, z) pairs in row-major order, or the factor form::

    {"x": [...], "y": [...], "z": [...],
     "y_given_x": [[...], ...], "z_given_x": [[...], ...], "independent": true}
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .capacity import bcc_sweep, maximize_direct, maximize_prefixed
from .detection import HypothesisPair, tradeoff_curve
from .errors import DimensionError, EffsecError
from .probcore import DEFAULT_ENUM_CAP, Alphabet, Dmc, Pmf, WiretapChannel, product_extension, push_forward
from .scenarios import example1_mismatch, example2_leaky, stealth_sweep, sweep_seed
from .wiretap_codes import DEFAULT_EPS, CodeParams, codebook_seeds, generate_codebook, per_message_matrix

ROW_TOL = 1e-9
RESULT_HEADER = ["n", "confusion_bits", "stealth_bits", "effective_bits", "error_prob", "alpha_plus_beta_min", "seed"]

EXIT_CODES = {
    "E_FORMAT": 3,
    "E_ROWSUM": 4,
    "E_DIMENSION": 5,
    "E_DOMAIN": 6,
    "E_ENUM_CAP": 7,
    "E_RESOURCE": 7,
    "E_PRECONDITION": 8,
}


class ChannelFormatError(EffsecError, ValueError):
    code = "E_FORMAT"


class RowSumError(EffsecError, ValueError):
    code = "E_ROWSUM"

    def __init__(self, matrix: str, row: int, total: float):
        self.row = row
        super().__init__(f"{matrix} row {row} sums to {total!r}, not 1")


# --- channel documents ------------------------------------------------------


def _matrix(doc: dict, key: str, rows: int, cols: int) -> np.ndarray:
    try:
        m = np.array(doc[key], dtype=float)
    except KeyError:
        raise ChannelFormatError(f"missing '{key}'") from None
    except (TypeError, ValueError) as exc:
        raise ChannelFormatError(f"'{key}' is not a numeric matrix: {exc}") from None
    if m.shape != (rows, cols):
        raise DimensionError(f"'{key}' has shape {m.shape}, expected {(rows, cols)}")
    for i, row in enumerate(m):
        if np.any(row < 0):
            raise ChannelFormatError(f"'{key}' row {i} has a negative entry")
        if abs(math.fsum(row) - 1.0) > ROW_TOL:
            raise RowSumError(key, i, math.fsum(row))
    return m


def channel_from_doc(doc: dict) -> WiretapChannel:
    if not isinstance(doc, dict):
        raise ChannelFormatError("channel document must be a JSON object")
    try:
        xa, ya, za = (Alphabet(tuple(doc[k])) for k in ("x", "y", "z"))
    except KeyError as exc:
        raise ChannelFormatError(f"missing alphabet {exc}") from None
    except TypeError:
        raise ChannelFormatError("alphabets must be lists of labels") from None
    if "joint" in doc:
        j = _matrix(doc, "joint", len(xa), len(ya) * len(za))
        return WiretapChannel(xa, ya, za, j.reshape(len(xa), len(ya), len(za)))
    if "y_given_x" in doc and "z_given_x" in doc:
        if not doc.get("independent", False):
            raise ChannelFormatError("factor form needs \"independent\": true")
        qy = _matrix(doc, "y_given_x", len(xa), len(ya))
        qz = _matrix(doc, "z_given_x", len(xa), len(za))
        return WiretapChannel.from_factors(Dmc(xa, ya, qy), Dmc(xa, za, qz))
    raise ChannelFormatError("need either 'joint' or 'y_given_x' + 'z_given_x'")


def parse_channel(path) -> WiretapChannel:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(f"{path}: not valid JSON ({exc})") from None
    return channel_from_doc(doc)


def channel_to_doc(ch: WiretapChannel) -> dict:
    return {
        "x": list(ch.input.symbols),
        "y": list(ch.y_alphabet.symbols),
        "z": list(ch.z_alphabet.symbols),
        "joint": np.asarray(ch.joint).reshape(len(ch.input), -1).tolist(),
    }


def emit_channel(ch: WiretapChannel, path) -> None:
    Path(path).write_text(json.dumps(channel_to_doc(ch), indent=2) + "\n")


# --- output -----------------------------------------------------------------


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _write_manifest(out: Path, args: argparse.Namespace, ch: WiretapChannel, extra: dict | None = None) -> None:
    config = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    manifest = {
        "toolkit": "effsec",
        "version": __version__,
        "subcommand": args.command,
        "config": config,
        "channel": channel_to_doc(ch),
    }
    if extra:
        manifest.update(extra)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _pmf_arg(text: str | None, alphabet: Alphabet) -> Pmf:
    if text is None:
        return Pmf.uniform(alphabet)
    vals = [float(v) for v in text.split(",")]
    if len(vals) != len(alphabet):
        raise DimensionError(f"input distribution has {len(vals)} entries, alphabet has {len(alphabet)}")
    return Pmf(alphabet, np.array(vals))


def _n_list(args) -> list[int]:
    if args.n_list:
        return [int(v) for v in args.n_list.split(",")]
    if args.n is not None:
        return [args.n]
    raise ValueError("give --n or --n-list")


def _regime_rows(res, seed: int) -> list[list]:
    return [
        [r.n, r.confusion, r.stealth, r.effective, r.error_prob, r.alpha_beta_min, seed] for r in res.records
    ]


# --- subcommands ------------------------------------------------------------


def cmd_capacity(args, ch: WiretapChannel, out: Path) -> None:
    d = maximize_direct(ch, args.grid, args.restarts, args.seed)
    p = maximize_prefixed(ch, args.v_size, args.grid, args.restarts, args.seed)
    rows = [["direct", d.value, args.seed], ["prefixed", p.value, args.seed]]
    _write_csv(out / "results.csv", ["quantity", "value_bits", "seed"], rows)
    _write_manifest(
        out, args, ch,
        {"argmax": {"direct_q_x": d.argmax.q_v.probs.tolist(),
                    "prefixed_q_v": p.argmax.q_v.probs.tolist(),
                    "prefixed_prefix": p.argmax.prefix.matrix.tolist()}},
    )


def cmd_bcc(args, ch: WiretapChannel, out: Path) -> None:
    lambdas = [float(v) for v in args.lam.split(",")]
    sizes = None
    if args.u_size is not None or args.v_size is not None:
        nx = len(ch.input)
        sizes = (args.u_size or nx, args.v_size or nx)
    pts = bcc_sweep(ch, lambdas, sizes, args.restarts, args.seed, args.grid)
    rows = [[lam, p.R0, p.R, args.seed] for lam, p in zip(lambdas, pts)]
    _write_csv(out / "results.csv", ["lambda", "R0_bits", "R_bits", "seed"], rows)
    _write_manifest(out, args, ch)


def _need_rates(args) -> None:
    if args.rate is None or args.rate1 is None:
        raise ValueError(f"{args.command} needs --rate and --rate1")


def cmd_sweep(args, ch, out: Path) -> None:
    _need_rates(args)
    q_x = _pmf_arg(args.input, ch.input)
    res = stealth_sweep(ch, q_x, args.rate, args.rate1, _n_list(args), args.codebooks, args.trials,
                        args.seed, args.eps, args.cap)
    _write_csv(out / "results.csv", RESULT_HEADER, _regime_rows(res, args.seed))
    _write_manifest(out, args, ch)


def cmd_example1(args, ch, out: Path) -> None:
    _need_rates(args)
    q_int = _pmf_arg(args.input, ch.input)
    q_act = _pmf_arg(args.actual, ch.input) if args.actual else q_int
    res = example1_mismatch(ch, q_int, q_act, args.rate, args.rate1, _n_list(args), args.codebooks,
                            args.trials, args.seed, args.eps, args.cap)
    _write_csv(out / "results.csv", RESULT_HEADER, _regime_rows(res, args.seed))
    _write_manifest(out, args, ch, {"single_letter_divergence": res.single_letter_divergence})


def cmd_example2(args, ch, out: Path) -> None:
    _need_rates(args)
    q_x = _pmf_arg(args.input, ch.input)
    res = example2_leaky(ch, q_x, args.rate, args.rate1, _n_list(args), args.codebooks, args.trials,
                         args.seed, args.eps, args.cap)
    _write_csv(out / "results.csv", RESULT_HEADER, _regime_rows(res, args.seed))
    _write_manifest(out, args, ch)


def cmd_detect(args, ch, out: Path) -> None:
    """Example-1 style run that also dumps the NP curve of each representative codebook."""
    _need_rates(args)
    q_int = _pmf_arg(args.input, ch.input)
    q_act = _pmf_arg(args.actual, ch.input) if args.actual else q_int
    ns = _n_list(args)
    res = example1_mismatch(ch, q_int, q_act, args.rate, args.rate1, ns, args.codebooks, args.trials,
                            args.seed, args.eps, args.cap)
    _write_csv(out / "results.csv", RESULT_HEADER, _regime_rows(res, args.seed))

    q_z = push_forward(q_int, ch.z_channel)
    curve_rows = []
    for n in sorted(set(ns)):
        params = CodeParams.from_rates(n, args.rate, args.rate1, args.eps)
        # first codebook of the ensemble, same derivation as the scenario run
        s = codebook_seeds(sweep_seed(args.seed, n), 1)[0]
        cb = generate_codebook(q_act, params, s)
        hp = HypothesisPair(product_extension(q_z, n, args.cap).probs, per_message_matrix(cb, ch, args.cap).mean(axis=0))
        curve_rows += [[n, pt.threshold, pt.alpha, pt.beta, pt.region_size] for pt in tradeoff_curve(hp)]
    _write_csv(out / "curve.csv", ["n", "threshold", "alpha", "beta", "region_size"], curve_rows)
    _write_manifest(out, args, ch, {"single_letter_divergence": res.single_letter_divergence})


COMMANDS = {
    "capacity": cmd_capacity,
    "bcc": cmd_bcc,
    "sweep": cmd_sweep,
    "example1": cmd_example1,
    "example2": cmd_example2,
    "detect": cmd_detect,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="effsec", description="Effective-secrecy wiretap simulations.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--channel", required=True, help="JSON channel document")
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--cap", type=int, default=DEFAULT_ENUM_CAP, help="dense enumeration cap")
        if name in ("capacity", "bcc"):
            p.add_argument("--grid", type=int, default=20, help="simplex grid resolution")
            p.add_argument("--restarts", type=int, default=4 if name == "capacity" else 8)
            p.add_argument("--v-size", type=int, default=None)
        if name == "bcc":
            p.add_argument("--lambda", dest="lam", default="0,0.5,1,2,4", help="comma-separated weights")
            p.add_argument("--u-size", type=int, default=None)
        if name in ("sweep", "example1", "example2", "detect"):
            p.add_argument("--rate", type=float, default=None)
            p.add_argument("--rate1", type=float, default=None)
            p.add_argument("--n", type=int, default=None)
            p.add_argument("--n-list", default=None, help="comma-separated blocklengths")
            p.add_argument("--eps", type=float, default=DEFAULT_EPS)
            p.add_argument("--codebooks", type=int, default=1 if name == "detect" else 200)
            p.add_argument("--trials", type=int, default=1000 if name == "detect" else 10_000)
            p.add_argument("--input", default=None, help="comma-separated input pmf (intended); uniform if omitted")
        if name in ("example1", "detect"):
            p.add_argument("--actual", default=None, help="comma-separated pmf actually used for codebooks")
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        ch = parse_channel(args.channel)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](args, ch, out)
    except EffsecError as exc:
        print(f"effsec {args.command}: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_CODES.get(exc.code, 1)
    except (ValueError, OSError) as exc:
        print(f"effsec {args.command}: E_INPUT: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())
