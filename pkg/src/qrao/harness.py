"""Batch experiment runner: graphs -> encodings -> VQE -> rounding -> JSON Lines records."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import yaml

from .encoding import assign_qrac, build_ising_hamiltonian, build_qrac_hamiltonian
from .errors import ParameterError, QraoError
from .graph import approximation_ratio, cut_value, generate_random_regular, max_cut_bruteforce
from .rounding import computational_rounding, magic_rounding, pauli_rounding
from .simulator import NoiseParams
from .vqe import VqeConfig, run_vqe

log = logging.getLogger(__name__)

METHODS = ("ising", "qrac-pauli", "qrac-magic")
Z95 = 1.96


@dataclass(frozen=True)
class ExperimentConfig:
    node_sizes: tuple[int, ...] = (8, 12)
    graphs_per_size: int = 10
    methods: tuple[str, ...] = METHODS
    vqe: VqeConfig = VqeConfig(shots_per_term=None)
    noise: NoiseParams = NoiseParams()
    magic_rounds: int = 1024
    readout_shots: int = 1  # computational-basis samples for the Ising arm
    pauli_shots: int | None = None  # None decodes from exact traces
    master_seed: int = 0
    output_path: str | None = None
    workers: int = 1
    degree: int = 3
    record_timing: bool = False  # wall times break byte-identical reruns
    record_trace: bool = False

    def __post_init__(self):
        object.__setattr__(self, "node_sizes", tuple(int(s) for s in self.node_sizes))
        object.__setattr__(self, "methods", tuple(self.methods))
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise ParameterError(f"methods must be a non-empty subset of {METHODS}, got {list(self.methods)}")
        if not self.node_sizes or any(s <= self.degree for s in self.node_sizes):
            raise ParameterError(f"every node size must exceed the degree {self.degree}")
        if self.graphs_per_size < 1 or self.magic_rounds < 1 or self.readout_shots < 1 or self.workers < 1:
            raise ParameterError("graphs_per_size, magic_rounds, readout_shots and workers must be >= 1")
        if self.pauli_shots is not None and self.pauli_shots < 1:
            raise ParameterError("pauli_shots must be >= 1 or None")

    @classmethod
    def from_mapping(cls, obj: Mapping) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        kw = dict(obj)
        if "vqe" in kw and not isinstance(kw["vqe"], VqeConfig):
            kw["vqe"] = VqeConfig(**kw["vqe"])
        if "noise" in kw and not isinstance(kw["noise"], NoiseParams):
            kw["noise"] = NoiseParams(**kw["noise"])
        return cls(**kw)

    def to_json(self) -> dict:
        out = asdict(self)
        out["node_sizes"] = list(self.node_sizes)
        out["methods"] = list(self.methods)
        return out


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    """Read a YAML or JSON config file (JSON is valid YAML)."""
    with open(path) as fh:
        obj = yaml.safe_load(fh)
    if not isinstance(obj, dict):
        raise ParameterError(f"{path}: config must be a key-value mapping")
    return ExperimentConfig.from_mapping(obj)


def child_seed(master_seed: int, *parts) -> int:
    """Stable 63-bit seed from the master seed and a key path."""
    key = "/".join(str(p) for p in (master_seed, *parts)).encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big") >> 1


def graph_seed(cfg: ExperimentConfig, size: int, index: int) -> int:
    return child_seed(cfg.master_seed, size, index, "graph")


class Job(NamedTuple):
    size: int
    index: int
    encoding: str  # "ising" or "qrac"
    methods: tuple[str, ...]


def plan_jobs(cfg: ExperimentConfig) -> list[Job]:
    """One job per (size, graph, encoding); both QRAC roundings share a VQE run."""
    qrac = tuple(m for m in cfg.methods if m.startswith("qrac"))
    jobs = []
    for size in cfg.node_sizes:
        for index in range(cfg.graphs_per_size):
            if "ising" in cfg.methods:
                jobs.append(Job(size, index, "ising", ("ising",)))
            if qrac:
                jobs.append(Job(size, index, "qrac", qrac))
    return jobs


def record_key(rec: Mapping) -> tuple[int, int, str]:
    return int(rec["num_nodes"]), int(rec["graph_index"]), str(rec["method"])


def _base(cfg: ExperimentConfig, job: Job, method: str) -> dict:
    return {
        "graph_id": f"rr{cfg.degree}-n{job.size}-g{job.index}",
        "graph_seed": graph_seed(cfg, job.size, job.index),
        "graph_index": job.index,
        "method": method,
        "num_nodes": job.size,
        "noise": asdict(cfg.noise),
    }


def run_job(cfg: ExperimentConfig, job: Job) -> list[dict]:
    """Full pipeline for one graph and encoding; failures become failed rows."""
    start = time.perf_counter()
    try:
        return _run_job(cfg, job, start)
    except QraoError as exc:
        log.warning("job %s failed: %s", job, exc)
        rows = []
        for m in job.methods:
            rec = _base(cfg, job, m)
            rec.update(status="failed", error=type(exc).__name__, message=str(exc))
            rows.append(rec)
        return rows


def _run_job(cfg: ExperimentConfig, job: Job, start: float) -> list[dict]:
    g = generate_random_regular(job.size, cfg.degree, graph_seed(cfg, job.size, job.index))
    vqe_cfg = VqeConfig(cfg.vqe.layers, cfg.vqe.sweeps, cfg.vqe.shots_per_term,
                        child_seed(cfg.master_seed, job.size, job.index, job.encoding, "vqe"))
    if job.encoding == "ising":
        h = build_ising_hamiltonian(g)
    else:
        assignment = assign_qrac(g)
        h = build_qrac_hamiltonian(g, assignment)
    res = run_vqe(h, vqe_cfg, cfg.noise)
    _, opt = max_cut_bruteforce(g)
    rows = []
    for m in job.methods:
        seed = child_seed(cfg.master_seed, job.size, job.index, m, "round")
        if m == "ising":
            out = computational_rounding(res.candidate_state, g, cfg.readout_shots, seed, opt_cut=opt)
        elif m == "qrac-pauli":
            out = pauli_rounding(res.candidate_state, assignment, g, shots=cfg.pauli_shots, seed=seed, opt_cut=opt)
        else:
            out = magic_rounding(res.candidate_state, assignment, cfg.magic_rounds, g, seed, opt_cut=opt)
        rec = _base(cfg, job, m)
        rec.update(
            status="ok",
            num_edges=g.num_edges,
            num_qubits=h.num_qubits,
            opt_cut=opt,
            vqe_energy=res.energy,
            initial_energy=res.initial_energy,
            energy_ratio=res.energy_ratio,
            rounded_bits="".join(map(str, out.bits)),
            cut=out.cut,
            ratio=out.ratio,
            shots_used=res.shots_used + out.shots_used,
            rounds_used=out.rounds_used,
            wall_time=round(time.perf_counter() - start, 3) if cfg.record_timing else None,
        )
        if cfg.record_trace:
            rec["energy_trace"] = list(res.energy_trace)
        rows.append(rec)
    return rows


def _dumps(rec: Mapping) -> str:
    return json.dumps(rec, sort_keys=True)


def _read_existing(path: str) -> list[dict]:
    """Valid records already on disk; a torn trailing line from a crash is dropped."""
    if not os.path.exists(path):
        return []
    good, lines, torn = [], [], False
    with open(path) as fh:
        for line in fh:
            try:
                rec = json.loads(line)
                record_key(rec)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                torn = True
                continue
            good.append(rec)
            lines.append(_dumps(rec))
    if torn:
        with open(path, "w") as fh:
            fh.writelines(s + "\n" for s in lines)
    return good


def run_experiment(cfg: ExperimentConfig) -> Iterator[dict]:
    """Yield records job by job, appending each to ``cfg.output_path`` if set.

    Existing records in the output file are kept and their jobs skipped, so a
    crashed run resumes where it stopped. Output order follows the job plan
    regardless of ``workers``.
    """
    done = set()
    if cfg.output_path:
        done = {record_key(r) for r in _read_existing(cfg.output_path)}
    todo = []
    for job in plan_jobs(cfg):
        missing = tuple(m for m in job.methods if (job.size, job.index, m) not in done)
        if missing:
            todo.append(job._replace(methods=missing))
    fh = open(cfg.output_path, "a") if cfg.output_path else None
    try:
        if cfg.workers > 1 and len(todo) > 1:
            with ProcessPoolExecutor(cfg.workers) as pool:
                results = pool.map(run_job, [cfg] * len(todo), todo)
                yield from _emit(results, fh)
        else:
            yield from _emit((run_job(cfg, j) for j in todo), fh)
    finally:
        if fh:
            fh.close()


def _emit(results: Iterable[list[dict]], fh) -> Iterator[dict]:
    for rows in results:
        for rec in rows:
            if fh:
                fh.write(_dumps(rec) + "\n")
                fh.flush()
            yield rec


def load_records(path: str | os.PathLike, verify: bool = True) -> list[dict]:
    """Read a JSON Lines result file; ``verify`` re-derives each ok row's cut and ratio."""
    recs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            rec = json.loads(line)
            if verify and rec.get("status") == "ok":
                verify_record(rec, lineno)
            recs.append(rec)
    return recs


def verify_record(rec: Mapping, lineno: int = 0) -> None:
    degree = int(rec["graph_id"].split("-")[0][2:])
    g = generate_random_regular(rec["num_nodes"], degree, rec["graph_seed"])
    bits = [int(b) for b in rec["rounded_bits"]]
    cut = cut_value(g, bits)
    if cut != rec["cut"] or not math.isclose(approximation_ratio(cut, rec["opt_cut"]), rec["ratio"]):
        raise ParameterError(f"record {lineno}: stored cut/ratio do not match its graph")


@dataclass(frozen=True)
class SummaryRow:
    num_nodes: int
    method: str
    count: int
    mean_ratio: float
    se_ratio: float
    ci_low: float
    ci_high: float
    mean_energy_ratio: float | None
    se_energy_ratio: float | None


def _mean_se(xs: Sequence[float]) -> tuple[float, float]:
    n = len(xs)
    mean = sum(xs) / n
    var = sum((x - mean) ** 2 for x in xs) / (n - 1)
    return mean, math.sqrt(var / n)


def aggregate(records: Iterable[Mapping]) -> list[SummaryRow]:
    """Per (size, method): mean ratio with a 95% normal CI, and mean energy ratio."""
    groups: dict[tuple[int, str], list[Mapping]] = {}
    for rec in records:
        if rec.get("status", "ok") == "ok":
            groups.setdefault((int(rec["num_nodes"]), rec["method"]), []).append(rec)
    if not groups:
        raise ParameterError("no successful records to aggregate")
    rows = []
    for (size, method), recs in sorted(groups.items()):
        if len(recs) < 2:
            raise ParameterError(f"group (|V|={size}, {method}) has {len(recs)} record(s); need >= 2")
        mean, se = _mean_se([r["ratio"] for r in recs])
        er = [r["energy_ratio"] for r in recs if r.get("energy_ratio") is not None]
        emean, ese = _mean_se(er) if len(er) >= 2 else (None, None)
        rows.append(SummaryRow(size, method, len(recs), mean, se, mean - Z95 * se, mean + Z95 * se, emean, ese))
    return rows


@dataclass(frozen=True)
class NoiseImpact:
    num_nodes: int
    method: str
    drop: float
    significant: bool  # the two CIs do not overlap


def compare_noise_impact(noiseless: Sequence[SummaryRow], noisy: Sequence[SummaryRow]) -> list[NoiseImpact]:
    a = {(r.num_nodes, r.method): r for r in noiseless}
    b = {(r.num_nodes, r.method): r for r in noisy}
    if a.keys() != b.keys():
        raise ParameterError(f"summary groups differ: {sorted(a.keys() ^ b.keys())}")
    out = []
    for key in sorted(a):
        x, y = a[key], b[key]
        sig = x.ci_low > y.ci_high or y.ci_low > x.ci_high
        out.append(NoiseImpact(key[0], key[1], x.mean_ratio - y.mean_ratio, sig))
    return out


def write_summary_csv(rows: Sequence[SummaryRow], path) -> None:
    names = [f.name for f in fields(SummaryRow)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for r in rows:
            w.writerow([getattr(r, n) for n in names])
