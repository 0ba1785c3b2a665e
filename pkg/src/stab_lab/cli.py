"""Command-line front end.

Every subcommand reads a state (from a JSON file or a named family), runs one
experiment, and writes a JSON or CSV artifact that embeds the version string
and the full configuration, so any output file is reproducible from its own
header. Primary outputs are written atomically and contain no timestamps
(byte-identical reruns); wall-clock metadata goes to a `<out>.run.json`
sidecar.

Exit codes: 0 success, 2 validation/usage error, 3 internal-consistency
failure (a checked identity or contract was violated).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import charfn, clifford, measures, states, tester, witness
from .gf2 import doubling_stats, symp_pack

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVARIANT = 3

_VALIDATION_ERRORS = (
    states.StateFormatError,
    measures.MeasureError,
    tester.TesterError,
    clifford.GateError,
    ValueError,
    OSError,
)
_INVARIANT_ERRORS = (witness.PipelineError, charfn.TableError)


def version_string() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True,
            text=True,
            timeout=5,
            cwd=os.path.dirname(os.path.abspath(__file__)),
        )
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    try:
        from importlib.metadata import version

        return "v" + version("stab-lab")
    except Exception:
        return "unknown"


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    state_file: Optional[str] = None
    family: Optional[str] = None
    n: Optional[int] = None
    x0: int = 0
    family_seed: int = 0
    eps: float = 0.0
    seed: int = 0
    shots: int = 10_000
    out: Optional[str] = None
    extra: dict = dataclasses.field(default_factory=dict)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["extra"] = dict(self.extra)
        return d


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".stab-lab-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(config: ExperimentConfig, payload: dict, csv_body: Optional[str] = None):
    """Write (or print) the artifact with version + config embedded."""
    header = {"version": version_string(), "config": config.to_dict()}
    if csv_body is not None:
        text = (
            f"# version={header['version']}\n"
            f"# config={json.dumps(header['config'], sort_keys=True)}\n"
            + csv_body
        )
    else:
        text = json.dumps({**header, **payload}, indent=2, sort_keys=True) + "\n"
    if config.out:
        _atomic_write(config.out, text)
        _atomic_write(
            config.out + ".run.json",
            json.dumps({"written_at": time.time(), "out": config.out}) + "\n",
        )
    else:
        sys.stdout.write(text)


def _load_state(config: ExperimentConfig, renormalize: bool = False):
    if config.state_file:
        with open(config.state_file) as fh:
            return states.load_state_json(fh.read(), renormalize=renormalize)
    if config.family:
        if config.n is None:
            raise states.StateFormatError("--n is required with --family")
        spec = states.FamilySpec(
            kind=config.family,
            n=config.n,
            x0=config.x0,
            seed=config.family_seed,
            eps=config.eps,
        )
        return states.make_state(spec)
    raise states.StateFormatError("provide --state or --family")


# ---------------------------------------------------------------------------
# Subcommand bodies


def _cmd_charfn(config: ExperimentConfig):
    t = charfn.char_function(_load_state(config).normalized())
    _emit(config, {}, csv_body=charfn.char_table_csv(t))


def _cmd_gowers(config: ExperimentConfig):
    state = _load_state(config).normalized()
    degree = int(config.extra.get("degree", 3))
    payload = {"gowers3_pow8": measures.gowers3(state)}
    if degree != 3 or (state.n <= 4 and config.extra.get("direct")):
        payload["direct_pow2d"] = measures.gowers_norm_direct(state, degree)
        payload["degree"] = degree
    _emit(config, payload)


def _cmd_measures(config: ExperimentConfig):
    report = measures.measure_report(_load_state(config).normalized())
    _emit(config, {"report": report.to_dict()})


def _cmd_rank(config: ExperimentConfig):
    state = _load_state(config).normalized()
    delta = float(config.extra.get("delta", 0.0))
    rank, wit = measures.stabilizer_rank(state, delta)
    _emit(
        config,
        {
            "rank": list(rank) if isinstance(rank, tuple) else rank,
            "witness": list(wit) if wit else None,
            "delta": delta,
        },
    )


def _cmd_fidelity(config: ExperimentConfig):
    state = _load_state(config).normalized()
    fid, wit = measures.stabilizer_fidelity(state)
    _emit(config, {"fidelity": fid, "witness": json.loads(wit.to_json())})


def _cmd_gram_scan(config: ExperimentConfig):
    rows = measures.lambda_star_scan(
        k_max=int(config.extra["k"]),
        n_max=int(config.extra["nmax"]),
        mode=config.extra.get("mode", "exhaustive"),
        trials=int(config.extra.get("trials", 2000)),
        seed=config.seed,
    )
    lines = ["k,n,min_lambda,witness,exhaustive,samples"]
    for r in rows:
        lam = "" if r.min_lambda == float("inf") else repr(r.min_lambda)
        wit = "" if r.witness is None else " ".join(map(str, r.witness))
        lines.append(f"{r.k},{r.n},{lam},{wit},{int(r.exhaustive)},{r.samples}")
    _emit(config, {}, csv_body="\n".join(lines) + "\n")


def _cmd_extract_stabilizer(config: ExperimentConfig):
    state = _load_state(config).normalized()
    wit, overlap, trace = witness.extract_stabilizer(state, seed=config.seed)
    payload = {
        "witness": json.loads(wit.to_json()),
        "overlap": overlap,
        "trace": {
            "n": trace.n,
            "gamma": trace.gamma,
            "nu": trace.nu,
            "which_part": trace.which_part,
            "balance_gates": [list(g) for g in trace.balance_circuit.gates],
            "stage_values": trace.stage_values,
            "map_search_exhaustive": trace.map_search_exhaustive,
            "q_upper_rows": list(trace.q_poly.upper_rows),
            "q_alpha": trace.q_poly.alpha,
            "correlation": trace.correlation,
            "final_overlap": trace.final_overlap,
            "theoretical_floor_log10": trace.theoretical_floor_log10,
        },
    }
    _emit(config, payload)


def _cmd_bell_sim(config: ExperimentConfig):
    state = _load_state(config).normalized()
    records = tester.bell_difference_sample(state, config.shots, config.seed)
    lines = ["y_bits,alpha_bits,same_bit"]
    n = state.n
    for r in records:
        y, alpha = r.z >> n, r.z & ((1 << n) - 1)
        lines.append(
            f"{format(y, f'0{n}b')},{format(alpha, f'0{n}b')},{int(r.same_bit)}"
        )
    _emit(config, {}, csv_body="\n".join(lines) + "\n")


def _cmd_tolerant_test(config: ExperimentConfig):
    state = _load_state(config).normalized()
    decision = tester.tolerant_test(
        state,
        eps1=float(config.extra["eps1"]),
        eps2=float(config.extra["eps2"]),
        shots=config.shots,
        seed=config.seed,
        threshold=config.extra.get("threshold"),
    )
    _emit(config, {"decision": dataclasses.asdict(decision)})


def _load_thresholds(path: str) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    return {(e["n"], e["k"]): e["threshold"] for e in data["entries"]}


def _cmd_rank_vs_haar(config: ExperimentConfig):
    state = _load_state(config).normalized()
    thresholds = _load_thresholds(config.extra["thresholds"])
    decision = tester.rank_vs_haar_test(
        state,
        k=int(config.extra["k"]),
        shots=config.shots,
        seed=config.seed,
        thresholds=thresholds,
    )
    _emit(config, {"decision": dataclasses.asdict(decision)})


def _cmd_calibrate(config: ExperimentConfig):
    result = tester.calibrate(
        n=int(config.extra["caln"]),
        k=int(config.extra["k"]),
        seed=config.seed,
        corpus_size=int(config.extra.get("corpus_size", 100)),
        shots=config.shots,
    )
    entries = []
    existing = config.extra.get("merge_into")
    if existing and os.path.exists(existing):
        with open(existing) as fh:
            entries = json.load(fh)["entries"]
        entries = [
            e for e in entries if (e["n"], e["k"]) != (result["n"], result["k"])
        ]
    entries.append(result)
    entries.sort(key=lambda e: (e["n"], e["k"]))
    _emit(config, {"entries": entries})


def _cmd_relations(config: ExperimentConfig):
    specs = []
    for n in (1, 2):
        specs.append(states.FamilySpec("uniform", n))
        specs.append(states.FamilySpec("basis", n))
        specs.append(states.FamilySpec("t_tensor", n))
        for s in range(5):
            specs.append(states.FamilySpec("haar", n, seed=config.seed + s))
    _emit(config, {"report": measures.relations_experiment(specs, seed=config.seed)})


def _cmd_doubling(config: ExperimentConfig):
    """Additive structure of a zeta-graph subset of the balanced table."""
    state = _load_state(config).normalized()
    delta = float(config.extra.get("delta", 0.05))
    tilde, nu, which = witness.split_real(state)
    circuit, balanced = clifford.balance(tilde, seed=config.seed)
    t = charfn.char_function(balanced)
    zs = witness.sample_zeta(t, delta, seed=config.seed)
    S = [
        symp_pack(state.n, y, zs.zeta[y])
        for y in range(t.N)
        if t.f[y, zs.zeta[y]] >= delta
    ]
    payload = {"delta": delta, "L_value": zs.L_value, "subset_size": len(S)}
    if S:
        energy, ratio = doubling_stats(state.n, S)
        payload.update({"additive_energy": energy, "sumset_ratio": ratio})
    _emit(config, payload)


_COMMANDS = {
    "charfn": _cmd_charfn,
    "gowers": _cmd_gowers,
    "measures": _cmd_measures,
    "rank": _cmd_rank,
    "fidelity": _cmd_fidelity,
    "gram-scan": _cmd_gram_scan,
    "extract-stabilizer": _cmd_extract_stabilizer,
    "bell-sim": _cmd_bell_sim,
    "tolerant-test": _cmd_tolerant_test,
    "rank-vs-haar": _cmd_rank_vs_haar,
    "calibrate": _cmd_calibrate,
    "relations": _cmd_relations,
    "doubling": _cmd_doubling,
}


def _add_state_args(p: argparse.ArgumentParser):
    p.add_argument("--state", help="state JSON file")
    p.add_argument("--family", help="named family: basis|uniform|haar|t_tensor")
    p.add_argument("--n", type=int, help="qubit count for --family")
    p.add_argument("--x0", type=int, default=0, help="basis index for --family basis")
    p.add_argument("--family-seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stab-lab",
        description="Desk-scale stabilizer complexity experiments",
    )
    default_seed = int(os.environ.get("STABLAB_SEED", "0"))
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=default_seed)
    common.add_argument("--out", help="output file (stdout if omitted)")
    common.add_argument("--shots", type=int, default=10_000)
    common.add_argument("--threads", type=int, default=1, help="worker hint")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name):
        return sub.add_parser(name, parents=[common])

    for name in ("charfn", "measures", "rank", "fidelity", "extract-stabilizer",
                 "bell-sim", "doubling"):
        p = add_parser(name)
        _add_state_args(p)
    sub.choices["rank"].add_argument("--delta", type=float, default=0.0)
    sub.choices["doubling"].add_argument("--delta", type=float, default=0.05)

    p = add_parser("gowers")
    _add_state_args(p)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--direct", action="store_true", help="also run brute force")

    p = add_parser("gram-scan")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--trials", type=int, default=2000)

    p = add_parser("tolerant-test")
    _add_state_args(p)
    p.add_argument("--eps1", type=float, required=True)
    p.add_argument("--eps2", type=float, required=True)
    p.add_argument("--threshold", type=float, default=None)

    p = add_parser("rank-vs-haar")
    _add_state_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--thresholds", required=True, help="thresholds JSON file")

    p = add_parser("calibrate")
    p.add_argument("--n", dest="caln", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--corpus-size", type=int, default=100)
    p.add_argument("--merge-into", help="existing thresholds file to update")

    add_parser("relations")
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    known = {
        "command", "seed", "out", "shots", "threads",
        "state", "family", "n", "x0", "family_seed", "eps",
    }
    extra = {
        k: v for k, v in vars(args).items() if k not in known and v is not None
    }
    return ExperimentConfig(
        command=args.command,
        state_file=getattr(args, "state", None),
        family=getattr(args, "family", None),
        n=getattr(args, "n", None),
        x0=getattr(args, "x0", 0),
        family_seed=getattr(args, "family_seed", 0),
        eps=getattr(args, "eps", 0.0),
        seed=args.seed,
        shots=args.shots,
        out=args.out,
        extra=extra,
    )


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    config = _config_from_args(args)
    try:
        _COMMANDS[config.command](config)
    except _INVARIANT_ERRORS as exc:
        print(f"internal-consistency failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
