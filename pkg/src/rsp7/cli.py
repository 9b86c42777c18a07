"""Command-line front end: run, sweep, verify, security.

All numeric output uses 12 fixed decimals so repeated invocations are
byte-identical and golden-file friendly.  Exit codes: 0 success, 2 usage
problem, 3 impossible forced branch, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import re
import sys
from typing import Callable, Optional, Sequence, TextIO

import numpy as np

from . import analysis, channel, noise, protocol
from .analysis import QubitScope, SweepConfig, SweepModel, SweepRow
from .noise import EvolutionModel, NoiseKind, NoiseSpec
from .protocol import ImpossibleBranchError, OutcomeKey, TargetState

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IMPOSSIBLE_BRANCH = 3
EXIT_IO = 4

OUTPUT_DIR_ENV = "RSP7_OUTPUT_DIR"

CSV_HEADER = (
    "noise",
    "eta",
    "alpha_re",
    "alpha_im",
    "beta_re",
    "beta_im",
    "branch",
    "fidelity_exact",
    "fidelity_truncated",
)

_ERROR_CELL = "impossible-branch"


def _fmt(x: float) -> str:
    return f"{x:.12f}"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# CSV serialization.


def write_sweep_csv(out: TextIO, rows: Sequence[SweepRow], target: TargetState) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(
            [
                row.kind.value,
                _fmt(row.eta),
                _fmt(target.alpha.real),
                _fmt(target.alpha.imag),
                _fmt(target.beta.real),
                _fmt(target.beta.imag),
                row.branch,
                _cell(row.fidelity_exact, row.error_exact),
                _cell(row.fidelity_truncated, row.error_truncated),
            ]
        )


def _cell(value: Optional[float], error: Optional[str]) -> str:
    if value is not None:
        return _fmt(value)
    return _ERROR_CELL if error else ""


def _parse_cell(text: str) -> tuple[Optional[float], Optional[str]]:
    if text == "":
        return None, None
    if text == _ERROR_CELL:
        return None, _ERROR_CELL
    return float(text), None


def read_sweep_csv(src: TextIO) -> tuple[tuple[SweepRow, ...], TargetState]:
    """Parse a sweep file back into rows; inverse of write_sweep_csv."""
    reader = csv.reader(src)
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header!r}")
    rows = []
    target = None
    for rec in reader:
        if len(rec) != len(CSV_HEADER):
            raise ValueError(f"malformed CSV record {rec!r}")
        kind = NoiseKind(rec[0])
        t = TargetState(
            complex(float(rec[2]), float(rec[3])),
            complex(float(rec[4]), float(rec[5])),
        )
        if target is None:
            target = t
        f_exact, err_exact = _parse_cell(rec[7])
        f_trunc, err_trunc = _parse_cell(rec[8])
        rows.append(
            SweepRow(
                kind=kind,
                eta=float(rec[1]),
                branch=rec[6],
                fidelity_exact=f_exact,
                fidelity_truncated=f_trunc,
                error_exact=err_exact,
                error_truncated=err_trunc,
            )
        )
    if target is None:
        raise ValueError("sweep file contains no data rows")
    return tuple(rows), target


def write_sweep_svg(out: TextIO, rows: Sequence[SweepRow]) -> None:
    """Minimal static line chart of fidelity against eta (plumbing only)."""
    width, height = 640, 420
    ml, mr, mt, mb = 50, 150, 20, 40
    pw, ph = width - ml - mr, height - mt - mb
    palette = (
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
    )
    kinds = sorted({r.kind for r in rows}, key=lambda k: k.value)
    color = {k: palette[i % len(palette)] for i, k in enumerate(kinds)}

    def px(eta: float) -> float:
        return ml + eta * pw

    def py(f: float) -> float:
        return mt + (1.0 - min(max(f, 0.0), 1.0)) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="black"/>',
        f'<text x="{ml + pw / 2:.1f}" y="{height - 8}" font-size="13" text-anchor="middle">eta</text>',
        f'<text x="14" y="{mt + ph / 2:.1f}" font-size="13" transform="rotate(-90 14 {mt + ph / 2:.1f})" text-anchor="middle">fidelity</text>',
    ]
    for tick in (0.0, 0.5, 1.0):
        parts.append(
            f'<text x="{px(tick):.1f}" y="{mt + ph + 16}" font-size="11" text-anchor="middle">{tick:g}</text>'
        )
        parts.append(
            f'<text x="{ml - 6}" y="{py(tick) + 4:.1f}" font-size="11" text-anchor="end">{tick:g}</text>'
        )
    legend_y = mt + 10
    for kind in kinds:
        for attr, dash in (("fidelity_exact", ""), ("fidelity_truncated", ' stroke-dasharray="5,3"')):
            pts = [
                f"{px(r.eta):.2f},{py(getattr(r, attr)):.2f}"
                for r in rows
                if r.kind == kind and getattr(r, attr) is not None
            ]
            if len(pts) >= 2:
                parts.append(
                    f'<polyline fill="none" stroke="{color[kind]}"{dash} points="{" ".join(pts)}"/>'
                )
        parts.append(
            f'<line x1="{ml + pw + 10}" y1="{legend_y}" x2="{ml + pw + 30}" y2="{legend_y}" stroke="{color[kind]}"/>'
        )
        parts.append(
            f'<text x="{ml + pw + 34}" y="{legend_y + 4}" font-size="11">{kind.value}</text>'
        )
        legend_y += 16
    parts.append("</svg>")
    out.write("\n".join(parts) + "\n")


# ---------------------------------------------------------------------------
# Configuration file + flag merging.


def load_config_file(path: str) -> dict[str, str]:
    """Flat key=value file; keys mirror long flag names; # starts a comment."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


class _Options:
    """Flag values merged over config-file values merged over defaults."""

    def __init__(self, ns: argparse.Namespace, file_values: dict[str, str]):
        self._ns = ns
        self._file = file_values

    def get(self, key: str, cast: Callable, default=None):
        flag = getattr(self._ns, key.replace("-", "_"), None)
        if flag is not None:
            return flag
        if key in self._file:
            raw = self._file[key]
            try:
                if cast is bool:
                    if raw.lower() in ("1", "true", "yes", "on"):
                        return True
                    if raw.lower() in ("0", "false", "no", "off"):
                        return False
                    raise ValueError(raw)
                return cast(raw)
            except ValueError as e:
                raise UsageError(f"config value {key}={raw!r} is invalid") from e
        return default


_TARGET_NORM_SLACK = 1e-6


def _resolve_target(opts: _Options) -> TargetState:
    a_re = opts.get("alpha", float)
    b_re = opts.get("beta", float)
    if a_re is None or b_re is None:
        raise UsageError("a target requires --alpha and --beta")
    alpha = complex(a_re, opts.get("alpha-im", float, 0.0))
    beta = complex(b_re, opts.get("beta-im", float, 0.0))
    norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    if abs(norm - 1.0) > _TARGET_NORM_SLACK:
        raise UsageError(
            f"|alpha|^2 + |beta|^2 = {norm ** 2:.9f}; amplitudes must be "
            f"normalized to within {_TARGET_NORM_SLACK:g}"
        )
    try:
        return TargetState(alpha / norm, beta / norm)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _resolve_output_path(opts: _Options, filename: str) -> str:
    out = opts.get("out", str)
    if out is not None:
        return out
    base = opts.get("output-dir", str) or os.environ.get(OUTPUT_DIR_ENV) or "."
    return os.path.join(base, filename)


# ---------------------------------------------------------------------------
# Commands.


_KEY_PATTERN = re.compile(r"U([12]),([01]{2}),([01]{2})")


def _parse_forced_key(text: str) -> OutcomeKey:
    """Malformed text is a usage error; a well-formed key naming a helper
    pattern the channel never produces is an impossible branch."""
    m = _KEY_PATTERN.fullmatch(text.strip())
    if m is None:
        raise UsageError(f"expected 'U1,cc,dd' or 'U2,cc,dd', got {text!r}")
    alice, charlie, david = int(m.group(1)), m.group(2), m.group(3)
    if (charlie, david) not in protocol.VALID_PAIRS:
        raise ImpossibleBranchError(
            f"forced branch U{alice},{charlie},{david} has probability "
            f"0.000000000000; helper pattern ({charlie},{david}) never occurs",
            probability=0.0,
        )
    return OutcomeKey(alice, charlie, david)


def _cmd_run(opts: _Options, stdout: TextIO) -> int:
    target = _resolve_target(opts)
    seed = opts.get("seed", int)
    forced_text = opts.get("force-outcome", str)
    if (seed is None) == (forced_text is None):
        raise UsageError("provide exactly one of --seed or --force-outcome")
    forced = None
    if forced_text is not None:
        try:
            forced = _parse_forced_key(forced_text)
        except ImpossibleBranchError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_IMPOSSIBLE_BRANCH
    try:
        transcript = protocol.run_rsp(target, seed=seed, forced_key=forced)
    except ImpossibleBranchError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IMPOSSIBLE_BRANCH
    amps = " ".join(
        f"{a.real + 0.0:+.12f}{a.imag + 0.0:+.12f}j" for a in transcript.bob_state
    )
    print(f"outcome: {transcript.outcome.label()}", file=stdout)
    print(f"probability: {_fmt(transcript.branch_probability)}", file=stdout)
    print(f"gates: {' '.join(transcript.gates)}", file=stdout)
    print(f"bob_state: {amps}", file=stdout)
    print(f"fidelity: {_fmt(transcript.fidelity)}", file=stdout)
    return EXIT_OK


def _parse_kinds(text: str) -> tuple[NoiseKind, ...]:
    if text == "all":
        return tuple(NoiseKind)
    kinds = []
    for part in text.split(","):
        try:
            kinds.append(NoiseKind(part.strip()))
        except ValueError:
            valid = ", ".join(k.value for k in NoiseKind)
            raise UsageError(f"unknown noise kind {part.strip()!r}; valid: all, {valid}")
    return tuple(kinds)


def _cmd_sweep(opts: _Options, stdout: TextIO) -> int:
    target = _resolve_target(opts)
    kinds = _parse_kinds(opts.get("noise", str, "all"))
    branch_text = opts.get("branch", str, "averaged")
    branch = None
    if branch_text != "averaged":
        try:
            branch = _parse_forced_key(branch_text)
        except ImpossibleBranchError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_IMPOSSIBLE_BRANCH
    model_text = opts.get("model", str, "both")
    try:
        model = SweepModel(model_text)
    except ValueError:
        raise UsageError(f"unknown model {model_text!r}; valid: exact, truncated, both")
    scope_text = opts.get("scope", str, "all")
    try:
        scope = QubitScope(scope_text)
    except ValueError:
        raise UsageError(f"unknown scope {scope_text!r}; valid: all, transmitted")
    try:
        config = SweepConfig(
            kinds=kinds,
            target=target,
            eta_start=opts.get("eta-start", float, 0.0),
            eta_end=opts.get("eta-end", float, 1.0),
            eta_steps=opts.get("steps", int, 11),
            model=model,
            branch=branch,
            qubit_scope=scope,
        )
    except ValueError as e:
        raise UsageError(str(e)) from e

    rows = analysis.fidelity_sweep(config)
    path = _resolve_output_path(opts, "sweep.csv")
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            write_sweep_csv(f, rows, target)
    except OSError as e:
        print(f"error: cannot write {path}: {e}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {len(rows)} rows to {path}", file=stdout)
    if opts.get("svg", bool, False):
        svg_path = os.path.splitext(path)[0] + ".svg"
        try:
            with open(svg_path, "w", encoding="utf-8", newline="") as f:
                write_sweep_svg(f, rows)
        except OSError as e:
            print(f"error: cannot write {svg_path}: {e}", file=sys.stderr)
            return EXIT_IO
        print(f"wrote chart to {svg_path}", file=stdout)
    return EXIT_OK


def _check(lines: list, name: str, ok: bool, detail: str) -> bool:
    lines.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok


def _cmd_verify(opts: _Options, stdout: TextIO) -> int:
    lines: list[str] = []
    ok = True
    rng = np.random.default_rng(20240817)

    psi = channel.build_channel()
    nonzero = np.abs(psi) > 1e-12
    mags = np.abs(psi[nonzero])
    amp = 1.0 / (4.0 * math.sqrt(2.0))
    ok &= _check(
        lines,
        "channel amplitudes",
        nonzero.sum() == 32 and float(np.max(np.abs(mags - amp))) <= 1e-12,
        f"{int(nonzero.sum())} entries at {np.mean(mags):.12f}",
    )
    norm_residual = abs(float(np.linalg.norm(psi)) - 1.0)
    ok &= _check(lines, "channel normalization", norm_residual <= 1e-12,
                 f"residual {norm_residual:.3e}")

    worst_fact = 0.0
    for _ in range(10):
        worst_fact = max(
            worst_fact, channel.verify_factorization(TargetState.random(rng))
        )
    ok &= _check(lines, "factorization residual", worst_fact <= 1e-12,
                 f"max over 10 random targets {worst_fact:.3e}")

    grouped = channel.verify_grouped_form()
    ok &= _check(lines, "grouped-form reconstruction",
                 grouped.residual_corrected <= 1e-12,
                 f"corrected-prefactor residual {grouped.residual_corrected:.3e}")

    report = protocol.table_report()
    n_ok = sum(
        1 for r in report.rules
        if protocol._sequence_defect(r.gates, protocol._block_pair(r.key)) <= 1e-10
    )
    ok &= _check(lines, "recovery table", n_ok == 16,
                 f"{n_ok}/16 rows verified or repaired")
    for r in report.repaired:
        lines.append(
            f"      repaired {r.key.label()}: printed gates "
            f"[{' '.join(r.printed_gates or ())}] defect {r.printed_gate_defect:.3f}, "
            f"now [{' '.join(r.gates)}]"
        )
    for r in report.rekeyed:
        c, d = r.printed_pair or ("?", "?")
        lines.append(
            f"      rekeyed  {r.key.label()}: printed helper label ({c},{d}) never occurs"
        )

    t = TargetState(1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))
    branches = protocol.enumerate_branches(t)
    p_dev = max(abs(b.branch_probability - 1.0 / 16.0) for b in branches)
    f_dev = max(abs(b.fidelity - 1.0) for b in branches)
    ok &= _check(lines, "branch probabilities", p_dev <= 1e-12,
                 f"max |p - 1/16| = {p_dev:.3e}")
    worst_f = f_dev
    for _ in range(5):
        worst_f = max(
            worst_f,
            max(abs(b.fidelity - 1.0)
                for b in protocol.enumerate_branches(TargetState.random(rng))),
        )
    ok &= _check(lines, "noiseless fidelity", worst_f <= 1e-12,
                 f"max |F - 1| over 6 targets x 16 branches = {worst_f:.3e}")

    worst_c = 0.0
    for kind in NoiseKind:
        for eta in np.linspace(0.0, 1.0, 21):
            worst_c = max(
                worst_c,
                noise.kraus_operators(kind, float(eta)).completeness_residual(),
            )
    ok &= _check(lines, "Kraus completeness", worst_c <= 1e-12,
                 f"max residual on 21-point grid {worst_c:.3e}")

    from .linalg import check_density

    rep = check_density(noise.evolved_state(NoiseSpec(NoiseKind.BIT_FLIP, 0.3)))
    ok &= _check(
        lines, "exact evolution invariants", rep.within(),
        f"hermiticity {rep.hermiticity_residual:.3e}, trace {rep.trace_residual:.3e}, "
        f"min eigenvalue {rep.min_eigenvalue:.3e}",
    )

    # closed-form traces of the two-term truncation at eta = 0.4
    eta = 0.4
    base = (1.0 - eta) ** 7
    expected_tr = {
        NoiseKind.BIT_FLIP: base + eta ** 7,
        NoiseKind.PHASE_FLIP: base + eta ** 7,
        NoiseKind.BIT_PHASE_FLIP: base + eta ** 7,
        NoiseKind.PHASE_DAMPING: base + 2.0 * eta ** 7 / 32.0,
        NoiseKind.DEPOLARIZING: base + 3.0 * (eta / 3.0) ** 7,
    }
    worst_tr = 0.0
    for kind, want in expected_tr.items():
        _, tr = noise.truncated_channel_state(NoiseSpec(kind, eta))
        worst_tr = max(worst_tr, abs(tr - want))
    ok &= _check(lines, "truncated trace identities", worst_tr <= 1e-12,
                 f"max residual at eta=0.4 over 5 closed forms {worst_tr:.3e}")

    worst_eta0 = 0.0
    key = protocol.ALL_OUTCOME_KEYS[0]
    for kind in NoiseKind:
        spec0 = NoiseSpec(kind, 0.0)
        for model in EvolutionModel:
            f = analysis.branch_fidelity(t, key, spec0, model)
            worst_eta0 = max(worst_eta0, abs(f - 1.0))
    ok &= _check(lines, "noiseless limit of noise machinery", worst_eta0 <= 1e-12,
                 f"max |F - 1| = {worst_eta0:.3e}")

    # empirical continuity modulus of the averaged exact-model fidelity
    # in eta (informational, no pass criterion attached)
    grid = np.linspace(0.0, 1.0, 11)
    vals = [
        analysis.averaged_fidelity(t, NoiseSpec(NoiseKind.DEPOLARIZING, float(e)),
                                   EvolutionModel.EXACT)
        for e in grid
    ]
    k_mod = max(abs(vals[i + 1] - vals[i]) / (grid[i + 1] - grid[i])
                for i in range(len(grid) - 1))
    lines.append(f"INFO  continuity modulus of averaged fidelity in eta: "
                 f"K = {k_mod:.6f} (depolarizing, exact model, 11 points)")

    for line in lines:
        print(line, file=stdout)
    print("", file=stdout)
    print("discrepancy report (published expressions vs direct construction):",
          file=stdout)
    for entry in analysis.discrepancy_report():
        print(f"  - {entry.subject}", file=stdout)
        print(f"      printed:  {entry.printed}", file=stdout)
        print(f"      computed: {entry.computed}", file=stdout)
        print(f"      residual: {entry.residual:.6f}", file=stdout)
    return EXIT_OK if ok else 1


def _cmd_security(opts: _Options, stdout: TextIO) -> int:
    mode = opts.get("mode", str)
    if mode == "inside":
        seed = opts.get("seed", int, 0)
        env_dim = opts.get("env-dim", int, 2)
        if env_dim < 2:
            raise UsageError("--env-dim must be at least 2")
        target = TargetState(1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))
        key = protocol.OutcomeKey(1, "00", "00")
        if opts.get("trivial", bool, False):
            res = analysis.inside_attack(target, key, analysis.AttackParams.trivial(env_dim))
            alt = analysis.inside_attack(TargetState(0.6, 0.8), key,
                                         analysis.AttackParams.trivial(env_dim))
            same_env = float(np.max(np.abs(res.env_state - alt.env_state)))
            print("attack: trivial (identity map, disentangled environment)", file=stdout)
            print(f"attacker-state purity: {_fmt(res.purity)}", file=stdout)
            print(f"environment purity: {_fmt(res.env_purity)}", file=stdout)
            print(f"environment dependence on target: {_fmt(same_env)}", file=stdout)
            print("the attack extracts no information about the prepared state",
                  file=stdout)
            return EXIT_OK
        samples = opts.get("samples", int, 100)
        if samples < 1:
            raise UsageError("--samples must be at least 1")
        rng = np.random.default_rng(seed)
        purities = []
        worst_residual = 0.0
        for _ in range(samples):
            params = analysis.AttackParams.random(env_dim, rng)
            res = analysis.inside_attack(target, key, params)
            purities.append(res.purity)
            worst_residual = max(worst_residual, res.isometry_residual)
        arr = np.array(purities)
        print(f"attack: sampled entangling maps (n={samples}, env_dim={env_dim}, seed={seed})",
              file=stdout)
        print(f"attacker-state purity: min {_fmt(arr.min())}  mean {_fmt(arr.mean())}  "
              f"max {_fmt(arr.max())}", file=stdout)
        print(f"max isometry residual: {worst_residual:.3e}", file=stdout)
        mixed = bool(arr.max() < 1.0 - 1e-6)
        print(f"attacker state always mixed (purity < 1 - 1e-6): {'yes' if mixed else 'no'}",
              file=stdout)
        return EXIT_OK if mixed else 1
    if mode == "outside":
        decoys = opts.get("decoys", int, 10)
        trials = opts.get("trials", int, 10000)
        seed = opts.get("seed", int, 0)
        strategy_text = opts.get("strategy", str, "intercept_resend")
        try:
            strategy = analysis.OutsideStrategy(strategy_text)
        except ValueError:
            valid = ", ".join(s.value for s in analysis.OutsideStrategy)
            raise UsageError(f"unknown strategy {strategy_text!r}; valid: {valid}")
        if decoys < 1:
            raise UsageError("--decoys must be at least 1")
        if trials < 1:
            raise UsageError("--trials must be at least 1")
        est = analysis.outside_attack_sim(decoys, strategy, trials=trials, seed=seed)
        ana = analysis.analytic_detection_probability(decoys)
        print(f"attack: {strategy.value} on {decoys} decoy qubits "
              f"({trials} trials, seed={seed})", file=stdout)
        print(f"detection probability estimate: {_fmt(est.probability)}", file=stdout)
        print(f"standard error: {_fmt(est.std_error)}", file=stdout)
        print(f"analytic 1 - (3/4)^m: {_fmt(ana)}", file=stdout)
        return EXIT_OK
    raise UsageError("--mode must be 'inside' or 'outside'")


# ---------------------------------------------------------------------------
# Parser and entry point.


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rsp7",
        description=(
            "Deterministic remote state preparation over a seven-qubit "
            "entangled channel: protocol runs, noise sweeps, invariant "
            "verification, attack simulations."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key=value file; flags override it")
        p.add_argument("--output-dir",
                       help=f"directory for outputs (default: ${OUTPUT_DIR_ENV} or .)")

    def add_target(p):
        p.add_argument("--alpha", type=float, help="real part of alpha")
        p.add_argument("--beta", type=float, help="real part of beta")
        p.add_argument("--alpha-im", type=float, help="imaginary part of alpha")
        p.add_argument("--beta-im", type=float, help="imaginary part of beta")

    p_run = sub.add_parser("run", help="run one protocol round")
    add_common(p_run)
    add_target(p_run)
    p_run.add_argument("--seed", type=int, help="sample the measurement branch")
    p_run.add_argument("--force-outcome", metavar="U1,cc,dd",
                       help="force a specific outcome key")

    p_sweep = sub.add_parser("sweep", help="fidelity sweep to CSV")
    add_common(p_sweep)
    add_target(p_sweep)
    p_sweep.add_argument("--noise", help="noise kind, comma list, or 'all'")
    p_sweep.add_argument("--eta-start", type=float)
    p_sweep.add_argument("--eta-end", type=float)
    p_sweep.add_argument("--steps", type=int, help="number of eta grid points")
    p_sweep.add_argument("--model", choices=[m.value for m in SweepModel])
    p_sweep.add_argument("--branch", help="'averaged' or an outcome key U1,cc,dd")
    p_sweep.add_argument("--scope", choices=[s.value for s in QubitScope],
                         help="qubits hit by noise: all | transmitted")
    p_sweep.add_argument("--out", help="output CSV path")
    p_sweep.add_argument("--svg", action="store_const", const=True,
                         help="also write a line chart next to the CSV")

    p_verify = sub.add_parser("verify", help="run the invariant suites")
    add_common(p_verify)

    p_sec = sub.add_parser("security", help="attack simulations")
    add_common(p_sec)
    p_sec.add_argument("--mode", choices=["inside", "outside"])
    p_sec.add_argument("--samples", type=int, help="inside: sampled attack maps")
    p_sec.add_argument("--env-dim", type=int, help="inside: environment dimension")
    p_sec.add_argument("--trivial", action="store_const", const=True,
                       help="inside: use the identity attack")
    p_sec.add_argument("--decoys", type=int, help="outside: decoy qubits per trial")
    p_sec.add_argument("--trials", type=int, help="outside: Monte-Carlo trials")
    p_sec.add_argument("--strategy",
                       choices=[s.value for s in analysis.OutsideStrategy])
    p_sec.add_argument("--seed", type=int)
    return parser


_COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
    "security": _cmd_security,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        file_values = load_config_file(ns.config) if ns.config else {}
        opts = _Options(ns, file_values)
        return _COMMANDS[ns.command](opts, sys.stdout)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
