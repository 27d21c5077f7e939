"""Batch front end: scenario files in, entropy tables out.

A scenario is a JSON document describing a model, one or more inverse
temperatures, a list of excitations and the tasks to run::

    {
      "model": {"type": "chain", "n": 3, "t": 1.0, "mu": 0.5},
      "beta": [0.5, 1.0, 2.0],
      "excitations": [{"mode": 0}, {"vector": [...], "symmetrize": true}],
      "reference_excitations": [{"mode": 1}],
      "tasks": ["single", "multi", "verify"]
    }

Models: ``chain`` (tridiagonal hopping, ``-t`` off-diagonal and ``-mu``
diagonal), ``random`` (seeded Gaussian Hermitian block) and ``explicit``
(an n x n Hermitian block, entries as numbers or ``[re, im]`` pairs); each
block is doubled into a self-dual generator.  ``beta`` is a number, a list,
or ``{"min", "max", "steps"}`` for a geometric grid.  Tasks: ``single``,
``multi``, ``between`` (against ``reference_excitations``), ``exponential``,
``npoint``, plus ``verify`` which attaches Fock-oracle values to every row.

Output is CSV (columns ``task,labels,beta,value,oracle_value,abs_err,ms,
note``) or JSON, deterministic for a fixed scenario and seed.  Wall times are
only measured under ``--timings`` since they would break byte-for-byte
reproducibility.  Exit codes: 0 ok, 1 oracle tolerance breach, 2 invalid
input, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CarEntropyError,
    ScenarioError,
    SizeLimitError,
    ValidationError,
    ZeroModeError,
)
from .fock_oracle import (
    DensityMatrix,
    build_fock_rep,
    excited_density,
    gibbs_density,
    represent_product,
    umegaki,
)
from .one_particle import (
    ExcitationVector,
    SelfDualHamiltonian,
    build_canonical_space,
    embed_hamiltonian,
    spectral_excitation,
    symmetrize_normalize,
)
from .quasifree import kms_state, n_point
from .relent import relent_between, relent_exponential, relent_multi, relent_single

TASKS = ("single", "multi", "between", "exponential", "npoint", "verify")
DEFAULT_TOLERANCE = 1e-6

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_INVALID = 2
EXIT_RESOURCE = 3


@dataclass(frozen=True)
class ResultRow:
    """One computed value, with oracle companion when verification ran."""

    task: str
    labels: str
    beta: float
    value: float
    oracle_value: float | None = None
    abs_err: float | None = None
    wall_ms: float | None = None
    note: str = ""


@dataclass(frozen=True)
class Scenario:
    """A validated scenario document."""

    model: dict
    betas: tuple[float, ...]
    excitations: tuple[dict, ...]
    reference_excitations: tuple[dict, ...]
    tasks: tuple[str, ...]
    output: str | None = None


def _fail(message: str, path: str):
    raise ScenarioError(message, path=path)


def _as_complex_entry(entry, path: str) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    if isinstance(entry, (list, tuple)) and len(entry) == 2 and all(
        isinstance(x, (int, float)) for x in entry
    ):
        return complex(entry[0], entry[1])
    _fail("matrix/vector entries must be numbers or [re, im] pairs", path)


def _parse_model(model, path="model") -> dict:
    if not isinstance(model, dict):
        _fail("must be an object", path)
    kind = model.get("type")
    if kind == "chain":
        n = model.get("n")
        if not isinstance(n, int) or n < 1:
            _fail("chain size n must be a positive integer", f"{path}.n")
        for key in ("t", "mu"):
            val = model.get(key)
            if not isinstance(val, (int, float)) or not math.isfinite(val):
                _fail(f"chain parameter {key} must be a finite number", f"{path}.{key}")
        return {"type": "chain", "n": n, "t": float(model["t"]), "mu": float(model["mu"])}
    if kind == "random":
        n = model.get("n")
        if not isinstance(n, int) or n < 1:
            _fail("random size n must be a positive integer", f"{path}.n")
        seed = model.get("seed")
        if not isinstance(seed, int) or seed < 0:
            _fail("random seed must be a nonnegative integer", f"{path}.seed")
        return {"type": "random", "n": n, "seed": seed}
    if kind == "explicit":
        rows = model.get("h0")
        if not isinstance(rows, list) or not rows:
            _fail("explicit model needs a nonempty square matrix h0", f"{path}.h0")
        n = len(rows)
        h0 = np.zeros((n, n), dtype=complex)
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                _fail(f"row {i} must have length {n}", f"{path}.h0[{i}]")
            for j, entry in enumerate(row):
                h0[i, j] = _as_complex_entry(entry, f"{path}.h0[{i}][{j}]")
        if not np.allclose(h0, h0.conj().T, rtol=0.0, atol=1e-10 * max(1.0, float(np.linalg.norm(h0)))):
            _fail("explicit matrix is not Hermitian", f"{path}.h0")
        return {"type": "explicit", "h0": h0}
    _fail("model type must be one of chain, random, explicit", f"{path}.type")


def _parse_betas(beta, path="beta") -> tuple[float, ...]:
    def one(val, p):
        if not isinstance(val, (int, float)) or not math.isfinite(val) or val <= 0:
            _fail("inverse temperature must be a positive finite number", p)
        return float(val)

    if isinstance(beta, (int, float)):
        return (one(beta, path),)
    if isinstance(beta, list):
        if not beta:
            _fail("beta list must be nonempty", path)
        return tuple(one(b, f"{path}[{i}]") for i, b in enumerate(beta))
    if isinstance(beta, dict):
        lo = one(beta.get("min"), f"{path}.min")
        hi = one(beta.get("max"), f"{path}.max")
        steps = beta.get("steps")
        if not isinstance(steps, int) or steps < 1:
            _fail("steps must be a positive integer", f"{path}.steps")
        if hi < lo:
            _fail("max must not be below min", f"{path}.max")
        return beta_grid(lo, hi, steps)
    _fail("must be a number, a list of numbers, or {min, max, steps}", path)


def beta_grid(lo: float, hi: float, steps: int) -> tuple[float, ...]:
    """Geometric grid of inverse temperatures, inclusive of both ends."""
    if steps == 1:
        return (float(lo),)
    return tuple(float(b) for b in np.geomspace(lo, hi, steps))


def _parse_excitations(specs, n_modes: int, path: str) -> tuple[dict, ...]:
    if specs is None:
        return ()
    if not isinstance(specs, list):
        _fail("must be a list of excitation specs", path)
    out = []
    for i, spec in enumerate(specs):
        p = f"{path}[{i}]"
        if not isinstance(spec, dict):
            _fail("excitation spec must be an object", p)
        if "mode" in spec:
            mode = spec["mode"]
            if not isinstance(mode, int) or mode < 0:
                _fail("mode must be a nonnegative integer", f"{p}.mode")
            if mode >= n_modes:
                _fail(f"mode {mode} does not exist (model has {n_modes} modes)", f"{p}.mode")
            out.append({"kind": "mode", "mode": mode, "label": spec.get("label", f"mode{mode}")})
        elif "vector" in spec:
            comps = spec["vector"]
            if not isinstance(comps, list) or len(comps) != 2 * n_modes:
                _fail(f"vector must have {2 * n_modes} entries", f"{p}.vector")
            vec = np.array(
                [_as_complex_entry(c, f"{p}.vector[{j}]") for j, c in enumerate(comps)]
            )
            symmetrize = spec.get("symmetrize", False)
            if not isinstance(symmetrize, bool):
                _fail("symmetrize must be a boolean", f"{p}.symmetrize")
            out.append(
                {
                    "kind": "vector",
                    "vector": vec,
                    "symmetrize": symmetrize,
                    "label": spec.get("label", f"vec{i}"),
                    "path": p,
                }
            )
        else:
            _fail("excitation spec needs a 'mode' or 'vector' key", p)
    return tuple(out)


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document (JSON)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")

    known = {"model", "beta", "excitations", "reference_excitations", "tasks", "output"}
    for key in doc:
        if key not in known:
            _fail(f"unknown field {key!r}", key)

    model = _parse_model(doc.get("model"))
    betas = _parse_betas(doc.get("beta"))
    n_modes = model["n"] if model["type"] != "explicit" else model["h0"].shape[0]
    excitations = _parse_excitations(doc.get("excitations"), n_modes, "excitations")
    references = _parse_excitations(doc.get("reference_excitations"), n_modes, "reference_excitations")

    tasks = doc.get("tasks")
    if not isinstance(tasks, list) or not tasks:
        _fail("tasks must be a nonempty list", "tasks")
    for i, task in enumerate(tasks):
        if task not in TASKS:
            _fail(f"unknown task {task!r}; valid: {', '.join(TASKS)}", f"tasks[{i}]")
    compute_tasks = [t for t in tasks if t != "verify"]
    if not compute_tasks:
        _fail("tasks must include at least one computation besides 'verify'", "tasks")
    if not excitations and any(t != "npoint" for t in compute_tasks):
        _fail("entropy tasks need at least one excitation", "excitations")

    output = doc.get("output")
    if output is not None and output not in ("csv", "json"):
        _fail("output must be 'csv' or 'json'", "output")

    return Scenario(
        model=model,
        betas=betas,
        excitations=excitations,
        reference_excitations=references,
        tasks=tuple(tasks),
        output=output,
    )


def build_model(scenario: Scenario, seed: int | None = None) -> SelfDualHamiltonian:
    """Materialize the scenario's self-dual generator.

    ``seed`` overrides the seed of a random model; other models ignore it.
    """
    model = scenario.model
    if model["type"] == "chain":
        n, t, mu = model["n"], model["t"], model["mu"]
        h0 = -mu * np.eye(n) + -t * (np.eye(n, k=1) + np.eye(n, k=-1))
    elif model["type"] == "random":
        rng = np.random.default_rng(model["seed"] if seed is None else seed)
        block = rng.standard_normal((model["n"],) * 2) + 1j * rng.standard_normal((model["n"],) * 2)
        h0 = (block + block.conj().T) / 2
    else:
        h0 = model["h0"]
    return embed_hamiltonian(build_canonical_space(h0.shape[0]), h0)


def _resolve_excitations(h: SelfDualHamiltonian, specs) -> list[ExcitationVector]:
    out = []
    for spec in specs:
        if spec["kind"] == "mode":
            try:
                out.append(spectral_excitation(h, spec["mode"], label=spec["label"]))
            except ValidationError as exc:
                raise ScenarioError(str(exc), path=f"excitations mode {spec['mode']}") from exc
        elif spec["symmetrize"]:
            out.append(symmetrize_normalize(h.space, spec["vector"], label=spec["label"]))
        else:
            try:
                out.append(
                    ExcitationVector(space=h.space, components=spec["vector"], label=spec["label"])
                )
            except ValidationError as exc:
                raise ScenarioError(f"inadmissible vector: {exc}", path=spec["path"]) from exc
    return out


@dataclass
class _Oracle:
    """Lazy Fock-oracle context; remembers why it is unavailable."""

    h: SelfDualHamiltonian
    max_modes: int
    rep: object = None
    reason: str | None = None
    gibbs: dict = field(default_factory=dict)

    def density(self, beta: float):
        if self.reason is not None:
            return None
        if self.rep is None:
            try:
                self.rep = build_fock_rep(self.h, max_modes=self.max_modes)
            except (ZeroModeError, SizeLimitError) as exc:
                self.reason = str(exc)
                return None
        if beta not in self.gibbs:
            self.gibbs[beta] = gibbs_density(self.rep, beta)
        return self.gibbs[beta]


def _oracle_entropy(oracle: _Oracle, beta: float, fs, gs=()) -> tuple[float | None, str]:
    rho = oracle.density(beta)
    if rho is None:
        return None, f"oracle unavailable: {oracle.reason}"
    if gs:
        U = represent_product(oracle.rep, [f.components for f in fs])
        V = represent_product(oracle.rep, [g.components for g in gs])
        sigma = DensityMatrix(V @ rho.matrix @ V.conj().T)
        tau = DensityMatrix(U @ rho.matrix @ U.conj().T)
        return umegaki(sigma, tau), ""
    return umegaki(rho, excited_density(oracle.rep, rho, fs)), ""


def _oracle_exponential(oracle: _Oracle, beta: float, f) -> tuple[float | None, str]:
    rho = oracle.density(beta)
    if rho is None:
        return None, f"oracle unavailable: {oracle.reason}"
    F = represent_product(oracle.rep, [f.components])
    E = math.cos(1.0) * np.eye(oracle.rep.dim) + 1j * math.sin(1.0) * F
    return umegaki(rho, DensityMatrix(E @ rho.matrix @ E.conj().T)), ""


def _oracle_npoint(oracle: _Oracle, beta: float, fs) -> tuple[float | None, str]:
    rho = oracle.density(beta)
    if rho is None:
        return None, f"oracle unavailable: {oracle.reason}"
    word = represent_product(oracle.rep, [f.components for f in fs])
    return complex(np.trace(rho.matrix @ word)).real, ""


def run(scenario: Scenario, *, seed: int | None = None,
        max_modes: int = 10, timings: bool = False) -> list[ResultRow]:
    """Evaluate a scenario and return one row per task, beta point and excitation set.

    When the scenario includes the ``verify`` task, each row carries the
    matching Fock-oracle value and the absolute error, or an explicit
    unavailability reason when the oracle cannot be built.
    """
    h = build_model(scenario, seed=seed)
    excitations = _resolve_excitations(h, scenario.excitations)
    references = _resolve_excitations(h, scenario.reference_excitations)
    want_oracle = "verify" in scenario.tasks
    oracle = _Oracle(h=h, max_modes=max_modes)

    states = {beta: kms_state(h, beta) for beta in scenario.betas}
    rows: list[ResultRow] = []

    def emit(task, labels, beta, compute, oracle_fn):
        start = time.perf_counter() if timings else None
        value, note = compute()
        oracle_value = None
        abs_err = None
        if want_oracle:
            oracle_value, oracle_note = oracle_fn()
            if oracle_value is not None:
                abs_err = abs(value - oracle_value)
            elif oracle_note:
                note = f"{note}; {oracle_note}" if note else oracle_note
        wall_ms = (time.perf_counter() - start) * 1e3 if timings else None
        rows.append(
            ResultRow(
                task=task,
                labels=labels,
                beta=beta,
                value=value,
                oracle_value=oracle_value,
                abs_err=abs_err,
                wall_ms=wall_ms,
                note=note,
            )
        )

    family_labels = "+".join(f.label for f in excitations)
    reference_labels = "+".join(g.label for g in references)

    for task in scenario.tasks:
        if task == "verify":
            continue
        for beta in scenario.betas:
            state = states[beta]
            if task in ("single", "exponential"):
                fn = relent_single if task == "single" else relent_exponential
                for exc in excitations:
                    emit(
                        task,
                        exc.label,
                        beta,
                        lambda s=state, e=exc, f=fn: (f(s, e).value, ""),
                        (
                            (lambda b=beta, e=exc: _oracle_entropy(oracle, b, [e]))
                            if task == "single"
                            else (lambda b=beta, e=exc: _oracle_exponential(oracle, b, e))
                        ),
                    )
            elif task == "multi":
                emit(
                    task,
                    family_labels,
                    beta,
                    lambda s=state: (relent_multi(s, excitations).value, ""),
                    lambda b=beta: _oracle_entropy(oracle, b, excitations),
                )
            elif task == "between":
                emit(
                    task,
                    f"{family_labels} vs {reference_labels}",
                    beta,
                    lambda s=state: (relent_between(s, excitations, references).value, ""),
                    lambda b=beta: _oracle_entropy(oracle, b, excitations, references),
                )
            elif task == "npoint":
                def compute_npoint(s=state):
                    val = n_point(s, [f.components for f in excitations])
                    note = "" if abs(val.imag) <= 1e-12 * max(1.0, abs(val)) else f"imag={val.imag:.3e}"
                    return val.real, note

                emit(
                    task,
                    family_labels,
                    beta,
                    compute_npoint,
                    lambda b=beta: _oracle_npoint(oracle, b, excitations),
                )
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{value:.17g}"


def render_csv(rows: list[ResultRow]) -> str:
    lines = ["task,labels,beta,value,oracle_value,abs_err,ms,note"]
    for row in rows:
        labels = row.labels
        if "," in labels or '"' in labels:
            labels = '"' + labels.replace('"', '""') + '"'
        lines.append(
            ",".join(
                [
                    row.task,
                    labels,
                    _fmt(row.beta),
                    _fmt(row.value),
                    _fmt(row.oracle_value),
                    _fmt(row.abs_err),
                    _fmt(row.wall_ms),
                    row.note.replace(",", ";"),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def render_json(rows: list[ResultRow]) -> str:
    payload = [
        {
            "task": row.task,
            "labels": row.labels,
            "beta": row.beta,
            "value": row.value,
            "oracle_value": row.oracle_value,
            "abs_err": row.abs_err,
            "ms": row.wall_ms,
            "note": row.note,
        }
        for row in rows
    ]
    return json.dumps(payload, indent=2) + "\n"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carentropy",
        description="Relative entropies of fermionic excitation states, with oracle verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("scenario", help="path to a scenario JSON file")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="output format (default: scenario setting or csv)")
        p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE,
                       help="acceptance tolerance for oracle comparison")
        p.add_argument("--seed", type=int, default=None, help="override the random-model seed")
        p.add_argument("--max-modes", type=int, default=10, help="Fock-oracle mode cap")
        p.add_argument("--timings", action="store_true",
                       help="measure wall times (makes output nondeterministic)")

    add_common(sub.add_parser("run", help="evaluate the scenario tasks"))
    add_common(sub.add_parser("verify", help="evaluate and compare against the Fock oracle"))
    sweep = sub.add_parser("sweep", help="evaluate over a geometric beta grid")
    add_common(sweep)
    sweep.add_argument("--beta-min", type=float, required=True)
    sweep.add_argument("--beta-max", type=float, required=True)
    sweep.add_argument("--steps", type=int, required=True)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        with open(args.scenario, "r", encoding="utf-8") as fh:
            scenario = parse_scenario(fh.read())
        if args.command == "verify" and "verify" not in scenario.tasks:
            scenario = Scenario(
                model=scenario.model,
                betas=scenario.betas,
                excitations=scenario.excitations,
                reference_excitations=scenario.reference_excitations,
                tasks=scenario.tasks + ("verify",),
                output=scenario.output,
            )
        if args.command == "sweep":
            if args.beta_min <= 0 or args.beta_max < args.beta_min or args.steps < 1:
                raise ScenarioError("sweep needs 0 < beta-min <= beta-max and steps >= 1")
            scenario = Scenario(
                model=scenario.model,
                betas=beta_grid(args.beta_min, args.beta_max, args.steps),
                excitations=scenario.excitations,
                reference_excitations=scenario.reference_excitations,
                tasks=scenario.tasks,
                output=scenario.output,
            )
        rows = run(scenario, seed=args.seed, max_modes=args.max_modes, timings=args.timings)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SizeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ScenarioError, CarEntropyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    fmt = args.format or scenario.output or "csv"
    text = render_csv(rows) if fmt == "csv" else render_json(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    breached = [r for r in rows if r.abs_err is not None and r.abs_err > args.tolerance]
    if breached:
        for row in breached:
            print(
                f"tolerance breach: {row.task} {row.labels} beta={row.beta:g} "
                f"abs_err={row.abs_err:.3e} > {args.tolerance:g}",
                file=sys.stderr,
            )
        return EXIT_TOLERANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
