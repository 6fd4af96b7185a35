"""Command-line front end.

Exit codes: 0 ok, 2 invalid input, 3 numeric-domain error, 64 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import game, gaussian, info, keyrates
from .errors import DomainError, StateError
from .qmat import QState

EX_OK, EX_INPUT, EX_DOMAIN, EX_USAGE = 0, 2, 3, 64
SUBCOMMANDS = ("discord", "game", "certify", "cv-rate", "plob-sweep")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: dict = field(default_factory=dict)
    output: str = "-"
    fmt: str = "json"
    options: dict = field(default_factory=dict)

    def validate(self):
        for name, path in self.inputs.items():
            if path is not None and not os.path.exists(path):
                raise StateError(f"{name}: no such file {path!r}")


def load_state(path):
    """Read a QState ("dims" key) or GaussianState ("modes" key) from JSON."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise StateError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise StateError(f"{path}: top level must be an object")
    if "dims" in data:
        return QState.from_json(data)
    if "modes" in data:
        return gaussian.GaussianState.from_json(data)
    raise StateError(f"{path}: expected a 'dims' (finite) or 'modes' (Gaussian) field")


def save_state(state, path) -> None:
    _write_atomic(path, json.dumps(state.to_json()) + "\n")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("DISCORDIA_THREADS", "1")))
    except ValueError:
        return 1


def parse_grid(text: str) -> list[float]:
    """'a:b:step' (inclusive) or a comma list."""
    try:
        if ":" in text:
            a, b, step = (float(x) for x in text.split(":"))
            if step <= 0 or b < a:
                raise ValueError
            n = int(round((b - a) / step)) + 1
            return [round(a + i * step, 12) for i in range(n)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}; use a:b:step or a comma list") from None


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return f"{float(v):.6g}"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _write_atomic(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".discordia-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- subcommands ------------------------------------------------------------

def cmd_discord(cfg: RunConfig) -> str:
    s = load_state(cfg.inputs["state"])
    m = cfg.options["measure"]
    if isinstance(s, QState):
        if not 0 <= m < s.nsys:
            raise StateError(f"--measure {m} out of range for dims {list(s.dims)}")
        rep = info.discord(s, m).to_json()
        rep["measured"] = m
    else:
        if not 0 <= m < s.modes:
            raise StateError(f"--measure {m} out of range for {s.modes} modes")
        d, params = gaussian.gaussian_discord(s, m)
        rep = {"discord": d, "mutual_info": gaussian.mutual_info(s), "measured": m,
               "measurement": params}
    if cfg.fmt == "csv":
        return to_csv(["measured", "mutual_info", "discord"],
                      [[m, rep["mutual_info"], rep["discord"]]])
    return to_json(rep)


def _load_ensemble(spec: str) -> game.EncodingEnsemble:
    builtin = {"pauli4": game.pauli4, "bitflip": game.bit_flip}
    if spec in builtin:
        return builtin[spec](0)
    try:
        return game.EncodingEnsemble.load(spec)
    except FileNotFoundError:
        raise StateError(f"ensemble: no such file {spec!r}") from None
    except (ValueError, TypeError) as exc:
        raise StateError(f"ensemble {spec}: {exc}") from None


def cmd_game(cfg: RunConfig) -> str:
    s = load_state(cfg.inputs["state"])
    if not isinstance(s, QState):
        raise StateError("game needs a finite-dimensional state ('dims' field)")
    rep = game.run_game(s, _load_ensemble(cfg.options["ensemble"])).to_json()
    if cfg.fmt == "csv":
        keys = ["i0", "ic", "iq", "delta_q", "j", "j_tilde", "discord_before",
                "discord_after", "mutual_tilde", "bounds_eq5_ok", "bounds_eq6_ok", "maximal"]
        return to_csv(keys, [[rep[k] for k in keys]])
    return to_json(rep)


def cmd_certify(cfg: RunConfig) -> str:
    s = load_state(cfg.inputs["state"])
    if not isinstance(s, QState):
        raise StateError("certify needs a finite-dimensional state ('dims' field)")
    o = cfg.options
    res = game.simulate_certification(s, o["strategy"], o["rounds"], o["seed"])
    if o.get("transcript"):
        _write_atomic(o["transcript"], to_csv(["round", "k", "guess"], res.transcript))
    rep = res.to_json()
    if cfg.fmt == "csv":
        keys = ["strategy", "rounds", "seed", "mi_estimate", "margin", "ic", "certified"]
        return to_csv(keys, [[rep[k] for k in keys]])
    return to_json(rep)


def cmd_cv_rate(cfg: RunConfig) -> str:
    etas, mus = cfg.options["eta"], cfg.options["mu"]
    for e in etas:
        if not 0.0 < e < 1.0:
            raise DomainError(f"eta must lie in (0, 1), got {e}")
    for m in mus:
        if m < 1:
            raise DomainError(f"mu must be >= 1, got {m}")
    points = [(e, m) for e in etas for m in mus]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        reports = list(pool.map(lambda p: keyrates.lossy_rr_rate(*p), points))
    if cfg.fmt == "json":
        if len(reports) == 1:
            return to_json(reports[0].to_json())
        return to_json([r.to_json() for r in reports])
    rows = [[r.eta, r.mu, r.reverse_coherent_info, r.discord_ba, r.plob, r.plob - r.r_reverse]
            for r in reports]
    return to_csv(["eta", "mu", "rci", "discord_ba", "plob", "gap"], rows)


def cmd_plob_sweep(cfg: RunConfig) -> str:
    etas = cfg.options["eta"]
    rows = [[e, keyrates.plob(e), keyrates.plob_linearized(e)] for e in etas]
    if cfg.fmt == "json":
        return to_json([{"eta": e, "plob": p, "linearized": l} for e, p, l in rows])
    return to_csv(["eta", "plob", "linearized"], rows)


COMMANDS = {
    "discord": cmd_discord,
    "game": cmd_game,
    "certify": cmd_certify,
    "cv-rate": cmd_cv_rate,
    "plob-sweep": cmd_plob_sweep,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="discordia", description="Quantum correlations, guessing games and CV key rates.")
    sub = p.add_subparsers(dest="subcommand", parser_class=_Parser)

    def common(sp, default_fmt):
        sp.add_argument("--output", "-o", default="-", help="report path (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default=default_fmt)

    sp = sub.add_parser("discord", help="I, J and discord of a state")
    sp.add_argument("--state", required=True)
    sp.add_argument("--measure", type=int, default=1, help="measured subsystem / mode")
    common(sp, "json")

    sp = sub.add_parser("game", help="channel-guessing game report")
    sp.add_argument("--state", required=True)
    sp.add_argument("--ensemble", default="pauli4", help="ensemble JSON path, 'pauli4' or 'bitflip'")
    common(sp, "json")

    sp = sub.add_parser("certify", help="simulate entangling-gate certification")
    sp.add_argument("--state", required=True)
    sp.add_argument("--strategy", choices=game.STRATEGIES, default="quantum_bell")
    sp.add_argument("--rounds", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--transcript", help="optional CSV of (round, k, guess)")
    common(sp, "json")

    sp = sub.add_parser("cv-rate", help="lossy-channel reverse-reconciliation rates")
    sp.add_argument("--eta", required=True, help="value, comma list or a:b:step")
    sp.add_argument("--mu", default=str(keyrates.DEFAULT_MU), help="value, comma list or a:b:step")
    common(sp, "json")

    sp = sub.add_parser("plob-sweep", help="-log2(1 - eta) over a grid")
    sp.add_argument("--eta", required=True, help="a:b:step or comma list")
    common(sp, "csv")
    return p


def make_config(args) -> RunConfig:
    cmd = args.subcommand
    inputs, opts = {}, {}
    if cmd in ("discord", "game", "certify"):
        inputs["state"] = args.state
    if cmd == "discord":
        opts["measure"] = args.measure
    elif cmd == "game":
        opts["ensemble"] = args.ensemble
    elif cmd == "certify":
        if args.rounds < game.MIN_ROUNDS:
            raise StateError(f"--rounds must be >= {game.MIN_ROUNDS}, got {args.rounds}")
        opts.update(strategy=args.strategy, rounds=args.rounds, seed=args.seed,
                    transcript=args.transcript)
    elif cmd == "cv-rate":
        opts.update(eta=parse_grid(args.eta), mu=parse_grid(args.mu))
    elif cmd == "plob-sweep":
        opts["eta"] = parse_grid(args.eta)
    return RunConfig(cmd, inputs, args.output, args.format, opts)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.subcommand is None:
            raise UsageError("a subcommand is required")
        cfg = make_config(args)
        cfg.validate()
        text = COMMANDS[cfg.subcommand](cfg)
        _write_atomic(cfg.output, text)
        return EX_OK
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        sys.stderr.write(parser.format_usage())
        return EX_USAGE
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EX_DOMAIN
    except (StateError, ValueError, IndexError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EX_INPUT


if __name__ == "__main__":
    sys.exit(main())
