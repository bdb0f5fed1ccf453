"""Command-line entry point: ``shorlab attack | analyze | exact | rank-qubits``.

Exit codes: 0 when the target k is among the candidates (or no target is
known), 3 when it is missing, 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from math import gcd
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .analysis import all_figures, write_figures
from .calibration import NotEnoughQubits, load_calibration_csv, rank_qubits
from .circuit import build_shor_circuit
from .conventions import PAPER_LITERAL, ConventionConfig
from .ecgroup import EcdlpInstance, default_encoding, load_curve_fixture
from .postprocess import (
    CandidateTable,
    extract_candidates,
    format_report,
    parse_counts,
    success_check,
)
from .results import BACKEND_ID, ResultsDocument, SchemaError, load, save
from .simulator import analytic_distribution, apply_noise, calibrate_conventions, decode_distribution, run_exact, sample

log = logging.getLogger("shorlab")

EXIT_HIT, EXIT_CONFIG, EXIT_MISS = 0, 2, 3
PRESETS = ("consistent", "paper-compat", "paper-literal")


class ConfigError(ValueError):
    pass


def preset_conventions(name: str) -> ConventionConfig:
    if name == "consistent":
        return calibrate_conventions(3)
    if name == "paper-compat":
        return calibrate_conventions(3).with_main_script_halves()
    if name == "paper-literal":
        return PAPER_LITERAL
    raise ConfigError(f"unknown preset {name!r}")


@dataclass(frozen=True)
class RunConfig:
    n: int = 5
    k: Optional[int] = None
    q_index: Optional[int] = None
    p_index: int = 1
    shots: int = 16384
    seed: int = 0
    noise_eps: float = 0.0
    readout_flip: float = 0.0
    top_n: int = 100
    preset: Optional[str] = None
    target_k: Optional[int] = None
    out: Optional[Path] = None
    calibration_csv: Optional[Path] = None
    curve: Optional[Path] = None

    def validate(self) -> "RunConfig":
        if (self.k is None) == (self.q_index is None):
            raise ConfigError("give exactly one of --k (consistent) or --q-index (paper-compat)")
        if not 1 <= self.n <= 8:
            raise ConfigError("--bits must be in [1, 8]")
        N = 1 << self.n
        for name in ("p_index", "q_index"):
            v = getattr(self, name)
            if v is not None and not 0 <= v < N:
                raise ConfigError(f"--{name.replace('_', '-')} must lie in [0, {N})")
        if self.shots < 1:
            raise ConfigError("--shots must be >= 1")
        if self.top_n < 1:
            raise ConfigError("--top must be >= 1")
        if not (0.0 <= self.noise_eps <= 1.0 and 0.0 <= self.readout_flip <= 1.0):
            raise ConfigError("noise parameters must lie in [0, 1]")
        preset = self.preset or ("consistent" if self.k is not None else "paper-compat")
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}")
        return replace(self, preset=preset)

    def echo(self) -> dict:
        d = asdict(self)
        del d["out"]  # where a run is written is not part of what it is
        for key in ("noise_eps", "readout_flip"):
            d[key] = repr(float(d[key]))
        for key in ("calibration_csv", "curve"):
            d[key] = None if d[key] is None else str(d[key])
        return d


def default_target_k(p_index: int, q_index: int, N: int, preset: str) -> Optional[int]:
    """Key the decoder should land on for a verbatim q_index.

    Compat presets follow the inverse-index reading (q_index 23 <-> k 7).
    """
    if preset == "consistent":
        return (q_index * pow(p_index, -1, N)) % N if gcd(p_index, N) == 1 else None
    return (p_index * pow(q_index, -1, N)) % N if gcd(q_index, N) == 1 else None


def build_instance(cfg: RunConfig) -> EcdlpInstance:
    if cfg.curve is not None:
        enc = load_curve_fixture(cfg.curve)
        if enc.order != 1 << cfg.n:
            raise ConfigError(f"curve fixture has order {enc.order}, need {1 << cfg.n}")
    else:
        enc = default_encoding(cfg.n)
    if cfg.k is not None:
        return EcdlpInstance.from_secret(enc, cfg.k, cfg.p_index)
    target = cfg.target_k
    if target is None:
        target = default_target_k(cfg.p_index, cfg.q_index, enc.order, cfg.preset)
    return EcdlpInstance.paper_compat(enc, cfg.q_index, cfg.p_index, secret_k=target)


def _physical_qubits(cfg: RunConfig) -> list[int]:
    if cfg.calibration_csv is None:
        return list(range(3 * cfg.n))
    return rank_qubits(load_calibration_csv(cfg.calibration_csv), 3 * cfg.n)


@dataclass(frozen=True)
class AttackOutcome:
    document: ResultsDocument
    table: CandidateTable
    report: str
    hit: bool
    rank: Optional[int]
    k_target: Optional[int]

    @property
    def exit_code(self) -> int:
        return EXIT_HIT if self.hit or self.k_target is None else EXIT_MISS


def cmd_attack(cfg: RunConfig) -> AttackOutcome:
    cfg = cfg.validate()
    conv = preset_conventions(cfg.preset)
    inst = build_instance(cfg)
    N = inst.encoding.order
    circuit = build_shor_circuit(cfg.n, inst.p_index, inst.q_index, conv)
    dist = apply_noise(run_exact(circuit), cfg.noise_eps, cfg.readout_flip)
    counts = sample(dist, cfg.shots, cfg.seed, conv)
    pairs = parse_counts(counts, cfg.n, conv)
    table = extract_candidates(pairs, N, cfg.top_n)
    k_target = cfg.k % N if cfg.k is not None else inst.secret_k
    hit, rank = success_check(table, k_target) if k_target is not None else (False, None)
    curve = inst.encoding.curve
    doc = ResultsDocument(
        experiment=f"ECDLP_{N}pts_Shors",
        backend=BACKEND_ID,
        physical_qubits=_physical_qubits(cfg),
        shots=cfg.shots,
        counts=dict(counts.counts),
        extensions={
            "config": cfg.echo(),
            "conventions": conv.to_dict(),
            "curve": {
                "p": curve.p, "a": curve.a, "b": curve.b,
                "generator": list(inst.encoding.generator), "order": N,
            },
            "p_index": inst.p_index,
            "q_index": inst.q_index,
            "seed": cfg.seed,
            "target_k": k_target,
            "version": __version__,
        },
    )
    report = format_report(table, k_target)
    if cfg.out is not None:
        out = Path(cfg.out)
        save(doc, out / "results.json")
        (out / "candidates.csv").write_text(table.to_csv(k_target))
        (out / "circuit.txt").write_text(circuit.dump())
        if k_target is not None:
            write_figures(all_figures(pairs, N, k_target), out / "figures", doc.run_id())
    return AttackOutcome(doc, table, report, hit, rank, k_target)


def cmd_analyze(
    path: str | Path,
    preset: Optional[str] = None,
    top_n: int = 100,
    target_k: Optional[int] = None,
    out: Optional[str | Path] = None,
) -> AttackOutcome:
    doc = load(path)
    ext = doc.extensions or {}
    if preset is not None:
        conv = preset_conventions(preset)
    elif "conventions" in ext:
        conv = ConventionConfig.from_dict(ext["conventions"])
    else:
        conv = preset_conventions("paper-compat")
    if target_k is None:
        target_k = ext.get("target_k")
    n = doc.n
    N = 1 << n
    pairs = parse_counts(doc.to_counts(), n, conv)
    table = extract_candidates(pairs, N, top_n)
    hit, rank = success_check(table, target_k) if target_k is not None else (False, None)
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "candidates.csv").write_text(table.to_csv(target_k))
        figure_k = target_k if target_k is not None else 0
        write_figures(all_figures(pairs, N, figure_k), out / "figures", doc.run_id())
    return AttackOutcome(doc, table, format_report(table, target_k), hit, rank, target_k)


def cmd_exact(cfg: RunConfig) -> tuple[str, float]:
    """CSV of decoded (a, b, probability, analytic) rows and the max |difference|."""
    cfg = cfg.validate()
    conv = preset_conventions(cfg.preset)
    N = 1 << cfg.n
    q_index = cfg.q_index if cfg.q_index is not None else (cfg.k * cfg.p_index) % N
    exact = run_exact(build_shor_circuit(cfg.n, cfg.p_index, q_index, conv))
    ridge = analytic_distribution(cfg.n, q_index, conv, p_index=cfg.p_index)
    diff = float(abs(exact.probs - ridge.probs).max())
    ex, an = decode_distribution(exact, conv), decode_distribution(ridge, conv)
    lines = ["a,b,probability,analytic"]
    for a in range(N):
        for b in range(N):
            lines.append(f"{a},{b},{float(ex.probs[a, b])!r},{float(an.probs[a, b])!r}")
    text = "\n".join(lines) + "\n"
    if cfg.out is not None:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "distribution.csv").write_text(text)
    return text, diff


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bits", dest="n", type=int, default=5, help="bits per register (default 5)")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--k", type=int, help="secret scalar; Q is derived from it (consistent mode)")
    mode.add_argument("--q-index", type=int, help="index of Q taken verbatim (paper-compat mode)")
    p.add_argument("--p-index", type=int, default=1)
    p.add_argument("--preset", choices=PRESETS)
    p.add_argument("--out", type=Path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shorlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    atk = sub.add_parser("attack", help="simulate, sample and recover k")
    _add_run_flags(atk)
    atk.add_argument("--shots", type=int, default=16384)
    atk.add_argument("--seed", type=int, default=0)
    atk.add_argument("--noise-eps", type=float, default=0.0)
    atk.add_argument("--readout-flip", type=float, default=0.0)
    atk.add_argument("--top", dest="top_n", type=int, default=100)
    atk.add_argument("--target-k", type=int, help="key counted as success in paper-compat mode")
    atk.add_argument("--calibration-csv", type=Path)
    atk.add_argument("--curve", type=Path, help="curve fixture JSON")

    ana = sub.add_parser("analyze", help="rebuild candidates and figures from a results JSON")
    ana.add_argument("input", type=Path)
    ana.add_argument("--preset", choices=PRESETS)
    ana.add_argument("--top", dest="top_n", type=int, default=100)
    ana.add_argument("--target-k", type=int)
    ana.add_argument("--out", type=Path)

    ex = sub.add_parser("exact", help="exact vs analytic outcome distribution")
    _add_run_flags(ex)

    rq = sub.add_parser("rank-qubits", help="rank physical qubits from a calibration CSV")
    rq.add_argument("csv", type=Path)
    rq.add_argument("-n", "--num", type=int, default=15)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s | %(levelname)s | %(message)s",
    )
    try:
        if args.command == "attack":
            cfg = RunConfig(
                n=args.n, k=args.k, q_index=args.q_index, p_index=args.p_index,
                shots=args.shots, seed=args.seed, noise_eps=args.noise_eps,
                readout_flip=args.readout_flip, top_n=args.top_n, preset=args.preset,
                target_k=args.target_k, out=args.out, calibration_csv=args.calibration_csv,
                curve=args.curve,
            )
            result = cmd_attack(cfg)
            sys.stdout.write(result.report)
            if args.out:
                log.info("Results saved → %s", args.out / "results.json")
            return result.exit_code
        if args.command == "analyze":
            if args.top_n < 1:
                raise ConfigError("--top must be >= 1")
            result = cmd_analyze(args.input, args.preset, args.top_n, args.target_k, args.out)
            sys.stdout.write(result.report)
            return result.exit_code
        if args.command == "exact":
            cfg = RunConfig(n=args.n, k=args.k, q_index=args.q_index, p_index=args.p_index,
                            preset=args.preset, out=args.out)
            text, diff = cmd_exact(cfg)
            if args.out is None:
                sys.stdout.write(text)
            print(f"max |exact - analytic| = {diff:.3e}", file=sys.stderr if args.out is None else sys.stdout)
            return EXIT_HIT
        if args.command == "rank-qubits":
            ids = rank_qubits(load_calibration_csv(args.csv), args.num)
            print("Best physical qubits:", ids)
            return EXIT_HIT
    except (ConfigError, SchemaError, NotEnoughQubits, FileNotFoundError, ValueError) as exc:
        print(f"shorlab: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
