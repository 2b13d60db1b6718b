"""Monte Carlo experiment orchestration.

A run is a pure function of its :class:`ExperimentConfig`.  Sample ``i``
draws its matrix from the stream for ``SeedPath(master_seed, i)``, so the
raw records do not depend on how samples are spread over workers.  Workers
receive contiguous index ranges and results are merged back in index order.

On disk a run is a directory holding ``raw.csv``, ``summary.json``,
``hist.csv`` and ``ecdf.csv``.
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import discrete, stats
from .ensembles import KINDS, EnsembleSpec, SeedPath, sample
from .errors import (
    ArtifactIOError,
    ConfigInvalid,
    DegenerateGap,
    DegenerateSample,
    HaltlabError,
    IterationLimitExceeded,
    MismatchedConfig,
)
from .linalg import eigen_oracle, tridiagonalize
from .toda import SpectralData, solve_t1

__all__ = [
    "ALGORITHMS",
    "HALTING_MODES",
    "RAW_HEADER",
    "ExperimentConfig",
    "HaltingSample",
    "RunArtifact",
    "parse_config_text",
    "load_config",
    "run_sample",
    "run_experiment",
    "save_artifact",
    "load_artifact",
    "compare_runs",
    "emit_plot_data",
]

ALGORITHMS = ("QR", "QRShifted", "Jacobi", "TodaT1", "CG")
HALTING_MODES = ("first_deflation", "t1_only", "full_spectrum")
RAW_HEADER = ("sample_index", "seed_path", "t", "k_hat", "lambda1_est",
              "lambda1_true", "gap", "discarded_reason")
OUTSIDE_SCALING = "outside_scaling_region"
GAP_PAIRING_KEY = "scaled_t1_vs_scaled_inverse_gap"


@dataclass
class ExperimentConfig:
    """One ensemble x algorithm experiment.

    ``epsilon`` and ``halting_mode`` default to ``None`` and resolve to
    1e-8 / ``t1_only`` for ``TodaT1`` and 1e-10 / ``first_deflation``
    otherwise.  ``profile`` applies to ``GeneralizedWigner``; ``aspect`` and
    ``factor`` to ``WishartSystem``.
    """

    ensemble: str = "GOE"
    algorithm: str = "QR"
    n: int = 100
    epsilon: float | None = None
    samples: int = 2000
    master_seed: int = 0
    workers: int | str = 1
    sigma_scaling: float = 0.5
    halting_mode: str | None = None
    tridiagonalize: bool = False
    profile: str = "two_band"
    aspect: float = 2.0
    factor: str = "gaussian"
    toda_grid_step: float = 0.25
    max_steps: int = discrete.MAX_STEPS

    def effective(self):
        """Copy with defaults resolved and types coerced; raises ConfigInvalid."""
        errors = {}
        cfg = dataclasses.replace(self)
        if cfg.ensemble not in KINDS:
            errors["ensemble"] = f"must be one of {', '.join(KINDS)}"
        if cfg.algorithm not in ALGORITHMS:
            errors["algorithm"] = f"must be one of {', '.join(ALGORITHMS)}"
        if cfg.epsilon is None:
            cfg.epsilon = 1e-8 if cfg.algorithm == "TodaT1" else 1e-10
        if cfg.halting_mode is None:
            cfg.halting_mode = "t1_only" if cfg.algorithm == "TodaT1" else "first_deflation"
        try:
            cfg.n = int(cfg.n)
            if cfg.n < 2:
                errors["n"] = "must be at least 2"
        except (TypeError, ValueError):
            errors["n"] = "must be an integer"
        try:
            cfg.epsilon = float(cfg.epsilon)
            if not 1e-14 <= cfg.epsilon < 1:
                errors["epsilon"] = "must lie in [1e-14, 1)"
        except (TypeError, ValueError):
            errors["epsilon"] = "must be a number"
        try:
            cfg.samples = int(cfg.samples)
            if cfg.samples < 2:
                errors["samples"] = "must be at least 2"
        except (TypeError, ValueError):
            errors["samples"] = "must be an integer"
        try:
            cfg.master_seed = int(cfg.master_seed)
            if not 0 <= cfg.master_seed < 2**64:
                errors["master_seed"] = "must be an unsigned 64-bit integer"
        except (TypeError, ValueError):
            errors["master_seed"] = "must be an integer"
        if cfg.workers != "auto":
            try:
                cfg.workers = int(cfg.workers)
                if cfg.workers < 1:
                    errors["workers"] = "must be positive or 'auto'"
            except (TypeError, ValueError):
                errors["workers"] = "must be an integer or 'auto'"
        try:
            cfg.sigma_scaling = float(cfg.sigma_scaling)
            if not 0 < cfg.sigma_scaling < 1:
                errors["sigma_scaling"] = "must lie in (0, 1)"
        except (TypeError, ValueError):
            errors["sigma_scaling"] = "must be a number"
        if cfg.halting_mode not in HALTING_MODES:
            errors["halting_mode"] = f"must be one of {', '.join(HALTING_MODES)}"
        elif cfg.algorithm == "TodaT1" and cfg.halting_mode != "t1_only":
            errors["halting_mode"] = "TodaT1 supports only t1_only"
        if cfg.algorithm == "CG" and cfg.ensemble != "WishartSystem":
            errors["ensemble"] = "CG needs the WishartSystem ensemble"
        if cfg.algorithm != "CG" and cfg.ensemble == "WishartSystem" and "algorithm" not in errors:
            errors["algorithm"] = "WishartSystem draws are linear systems; use CG"
        if isinstance(cfg.tridiagonalize, str):
            cfg.tridiagonalize = _parse_bool(cfg.tridiagonalize)
        if cfg.factor not in ("gaussian", "bernoulli"):
            errors["factor"] = "must be gaussian or bernoulli"
        if cfg.profile not in ("flat", "two_band"):
            errors["profile"] = "must be flat or two_band"
        for name in ("aspect", "toda_grid_step"):
            try:
                setattr(cfg, name, float(getattr(cfg, name)))
                if getattr(cfg, name) <= 0:
                    errors[name] = "must be positive"
            except (TypeError, ValueError):
                errors[name] = "must be a number"
        if cfg.ensemble == "WishartSystem" and "n" not in errors and "aspect" not in errors:
            if math.ceil(cfg.aspect * cfg.n) <= cfg.n:
                errors["aspect"] = "ceil(aspect * n) must exceed n"
        try:
            cfg.max_steps = int(cfg.max_steps)
        except (TypeError, ValueError):
            errors["max_steps"] = "must be an integer"
        if errors:
            raise ConfigInvalid(errors)
        return cfg

    @property
    def outside_scaling_region(self):
        if self.algorithm != "TodaT1":
            return False
        return not stats.check_scaling_region(self.epsilon, self.n, self.sigma_scaling)

    def ensemble_spec(self):
        extra = {}
        if self.ensemble == "GeneralizedWigner":
            extra["profile"] = self.profile
        elif self.ensemble == "WishartSystem":
            extra = {"aspect": self.aspect, "factor": self.factor}
        return EnsembleSpec(self.ensemble, self.n, extra)

    def to_dict(self):
        return dataclasses.asdict(self)

    def content_hash(self):
        """Digest of the result-determining fields (everything but ``workers``)."""
        d = self.effective().to_dict()
        d.pop("workers")
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    @property
    def label(self):
        tag = self.ensemble
        if self.ensemble == "WishartSystem":
            tag = f"Wishart-{self.factor}"
        return f"{tag}/{self.algorithm}"


_FIELD_TYPES = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def _parse_bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _coerce(name, text):
    text = text.strip()
    if text.lower() in ("none", ""):
        return None
    if name == "tridiagonalize":
        return _parse_bool(text)
    if name in ("n", "samples", "master_seed", "max_steps"):
        return int(float(text)) if "e" in text.lower() else int(text)
    if name == "workers":
        return text if text == "auto" else int(text)
    if name in ("epsilon", "sigma_scaling", "aspect", "toda_grid_step"):
        return float(text)
    return text


def parse_config_text(text):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    errors = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors[f"line {lineno}"] = "expected key = value"
            continue
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            errors[key] = "unknown key"
            continue
        try:
            values[key] = _coerce(key, val)
        except ValueError as exc:
            errors[key] = str(exc)
    if errors:
        raise ConfigInvalid(errors)
    return values


def load_config(path=None, overrides=None):
    values = {}
    if path is not None:
        try:
            values.update(parse_config_text(Path(path).read_text()))
        except OSError as exc:
            raise ArtifactIOError(f"cannot read config {path}: {exc}") from exc
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = v
    return ExperimentConfig(**values).effective()


@dataclass
class HaltingSample:
    sample_index: int
    seed_path: str
    t: float | None = None
    k_hat: int | None = None
    lambda1_est: float | None = None
    lambda1_true: float | None = None
    gap: float | None = None
    discarded_reason: str = ""

    @property
    def retained(self):
        return not self.discarded_reason

    def row(self):
        out = []
        for name in RAW_HEADER:
            v = getattr(self, name)
            if v is None:
                out.append("")
            elif isinstance(v, float):
                out.append(repr(v))
            else:
                out.append(str(v))
        return out


def _first_row_k1(x0, epsilon, algorithm, max_steps):
    for m, x in enumerate(discrete.iterate(x0, algorithm)):
        if float(np.linalg.norm(x[0, 1:])) <= epsilon:
            return m, x
        if m >= max_steps:
            raise IterationLimitExceeded(f"no 1-deflation within {max_steps} steps")


def run_sample(cfg, index):
    """Execute one Monte Carlo sample; failures become a discard reason."""
    seed = SeedPath(cfg.master_seed, index)
    rec = HaltingSample(index, str(seed))
    try:
        draw = sample(cfg.ensemble_spec(), seed)
        if cfg.algorithm == "CG":
            h, b = draw
            rec.t = discrete.cg_halting_time(h, b, cfg.epsilon)
            return rec
        eig = eigen_oracle(draw)
        lam = eig.eigenvalues
        rec.lambda1_true = float(lam[0])
        rec.gap = float(lam[0] - lam[1])
        if rec.gap <= stats.GAP_THRESHOLD:
            raise DegenerateGap(f"top gap {rec.gap:g}")
        if cfg.algorithm == "TodaT1":
            w = eig.eigenvectors[0] ** 2
            res = solve_t1(SpectralData(lam, w / w.sum()), cfg.epsilon, grid_step=cfg.toda_grid_step)
            rec.t, rec.k_hat, rec.lambda1_est = float(res.t_halt), 1, float(res.x11_at_halt)
            return rec
        x0 = tridiagonalize(draw)[0] if cfg.tridiagonalize else draw
        if cfg.halting_mode == "first_deflation":
            dr, state = discrete.deflation_time(x0, cfg.epsilon, cfg.algorithm,
                                                cfg.max_steps, return_state=True)
            rec.t, rec.k_hat, rec.lambda1_est = dr.t, dr.k_hat, float(state[0, 0])
        elif cfg.halting_mode == "t1_only":
            m, state = _first_row_k1(x0, cfg.epsilon, cfg.algorithm, cfg.max_steps)
            rec.t, rec.k_hat, rec.lambda1_est = m, 1, float(state[0, 0])
        else:
            est = discrete.compute_spectrum_with_deflation(x0, cfg.epsilon, cfg.algorithm, cfg.max_steps)
            first = discrete.deflation_time(x0, cfg.epsilon, cfg.algorithm, cfg.max_steps)
            rec.t, rec.k_hat, rec.lambda1_est = sum(est.block_steps), first.k_hat, float(est.eigenvalues[0])
        return rec
    except HaltlabError as exc:
        return HaltingSample(index, str(seed), discarded_reason=type(exc).__name__)


def _run_chunk(args):
    cfg, start, stop = args
    return [run_sample(cfg, i) for i in range(start, stop)]


@dataclass
class RunArtifact:
    config: ExperimentConfig
    records: list
    summary: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def retained(self):
        return [r for r in self.records if r.retained]

    def times(self):
        return np.array([r.t for r in self.retained], dtype=float)

    @property
    def flags(self):
        return [OUTSIDE_SCALING] if self.config.outside_scaling_region else []

    @property
    def label(self):
        base = self.config.label
        return base + "".join(f"[{f}]" for f in self.flags)

    def raw_csv(self):
        buf = io.StringIO()
        if self.flags:
            buf.write("# " + " ".join(self.flags) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RAW_HEADER)
        for r in self.records:
            w.writerow(r.row())
        return buf.getvalue()

    def summary_json(self):
        return json.dumps(self.summary, sort_keys=True, indent=2) + "\n"


def _resolve_workers(workers):
    if workers == "auto":
        return max(1, os.cpu_count() or 1)
    return int(workers)


def _summarize(cfg, records, wall_time):
    retained = [r for r in records if r.retained]
    discards = {}
    for r in records:
        if not r.retained:
            discards[r.discarded_reason] = discards.get(r.discarded_reason, 0) + 1
    summary = {
        "config": cfg.to_dict(),
        "config_hash": cfg.content_hash(),
        "label": cfg.label,
        "flags": [OUTSIDE_SCALING] if cfg.outside_scaling_region else [],
        "requested": cfg.samples,
        "retained": len(retained),
        "discards": dict(sorted(discards.items())),
        "wall_time": wall_time,
        "ks": {},
    }
    t = np.array([r.t for r in retained], dtype=float)
    if t.size >= 2:
        summary["mean"] = float(t.mean())
        summary["sd"] = float(t.std(ddof=1))
        try:
            tn = stats.normalize_times(t)
        except DegenerateSample:
            tn = None
        if tn is not None:
            summary["normalized"] = [float(v) for v in tn]
            h = stats.histogram(tn, normalization="density")
            summary["histogram"] = {"bin_edges": h.bin_edges.tolist(), "counts": h.counts.tolist()}
    if cfg.algorithm == "TodaT1" and len(retained) >= 2:
        st = stats.scaled_t1(t, cfg.n, cfg.epsilon)
        gaps = np.array([r.gap for r in retained])
        inv = 1.0 / (cfg.n ** (2.0 / 3.0) * gaps)
        summary["ks"][GAP_PAIRING_KEY] = stats.ks_distance(st, inv)
        err = np.abs(np.array([r.lambda1_est - r.lambda1_true for r in retained]))
        summary["eigenvalue_capture"] = float(np.mean(err <= cfg.epsilon))
    return summary


def run_experiment(config):
    """Run all samples of ``config`` and aggregate them.

    Per-sample failures are recorded as discards and never abort the run.
    """
    cfg = config.effective()
    workers = min(_resolve_workers(cfg.workers), cfg.samples)
    t0 = time.perf_counter()
    if workers == 1:
        records = _run_chunk((cfg, 0, cfg.samples))
    else:
        bounds = np.linspace(0, cfg.samples, workers + 1).astype(int)
        chunks = [(cfg, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = [r for part in pool.map(_run_chunk, chunks) for r in part]
    wall = time.perf_counter() - t0
    return RunArtifact(cfg, records, _summarize(cfg, records, wall), wall)


def _write(path, text):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ArtifactIOError(f"cannot write {path}: {exc}") from exc


def save_artifact(artifact, root):
    """Write a run into ``root/run-<config hash>/`` and return that directory."""
    out = Path(root) / f"run-{artifact.config.content_hash()}"
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ArtifactIOError(f"cannot create {out}: {exc}") from exc
    _write(out / "raw.csv", artifact.raw_csv())
    _write(out / "summary.json", artifact.summary_json())
    emit_plot_data([artifact], out)
    return out


def _float_or_none(text):
    return float(text) if text != "" else None


def _number_or_none(text):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        return float(text)


def load_artifact(path):
    """Read a run directory written by :func:`save_artifact`."""
    path = Path(path)
    try:
        summary = json.loads((path / "summary.json").read_text())
        lines = [ln for ln in (path / "raw.csv").read_text().splitlines() if not ln.startswith("#")]
    except OSError as exc:
        raise ArtifactIOError(f"cannot read artifact {path}: {exc}") from exc
    cfg = ExperimentConfig(**summary["config"]).effective()
    records = []
    for row in csv.DictReader(lines):
        records.append(HaltingSample(
            sample_index=int(row["sample_index"]),
            seed_path=row["seed_path"],
            t=_number_or_none(row["t"]),
            k_hat=int(row["k_hat"]) if row["k_hat"] else None,
            lambda1_est=_float_or_none(row["lambda1_est"]),
            lambda1_true=_float_or_none(row["lambda1_true"]),
            gap=_float_or_none(row["gap"]),
            discarded_reason=row["discarded_reason"],
        ))
    return RunArtifact(cfg, records, summary, summary.get("wall_time", 0.0))


def _labels(artifacts):
    seen = {}
    out = []
    for a in artifacts:
        lab = a.label
        seen[lab] = seen.get(lab, 0) + 1
        out.append(lab if seen[lab] == 1 else f"{lab}#{seen[lab]}")
    return out


def compare_runs(artifact_a, artifact_b, bins=None):
    """KS distance between two runs' normalized halting times.

    Both runs must share algorithm, ``n`` and ``epsilon`` and retain at
    least 100 samples.  The report carries density histograms of both
    normalized samples on a common set of edges.
    """
    ca, cb = artifact_a.config, artifact_b.config
    diffs = [k for k in ("algorithm", "n", "epsilon") if getattr(ca, k) != getattr(cb, k)]
    if diffs:
        raise MismatchedConfig(f"runs differ in {', '.join(diffs)}")
    ta, tb = artifact_a.times(), artifact_b.times()
    if min(ta.size, tb.size) < 100:
        raise ValueError("compare_runs needs at least 100 retained samples per run")
    na, nb = stats.normalize_times(ta), stats.normalize_times(tb)
    pooled = np.concatenate([na, nb])
    edges = stats.freedman_diaconis_edges(pooled) if bins is None else \
        stats.histogram(pooled, bins).bin_edges
    ha = stats.histogram(na, edges, "density")
    hb = stats.histogram(nb, edges, "density")
    la, lb = _labels([artifact_a, artifact_b])
    return {
        "labels": [la, lb],
        "algorithm": ca.algorithm,
        "n": ca.n,
        "epsilon": ca.epsilon,
        "retained": [int(ta.size), int(tb.size)],
        "ks": stats.ks_distance(na, nb),
        "bin_edges": edges.tolist(),
        "density": [ha.density.tolist(), hb.density.tolist()],
    }


def emit_plot_data(artifacts, path, bins=None):
    """Write ``hist.csv`` and ``ecdf.csv`` for normalized halting times.

    Histograms of all artifacts share bin edges spanning the union of their
    samples.  ``ecdf.csv`` evaluates every ECDF on the pooled sample
    points, so the largest absolute column difference is the KS distance.
    Returns the two paths written.
    """
    artifacts = list(artifacts)
    if not artifacts:
        raise ValueError("no artifacts to plot")
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ArtifactIOError(f"cannot create {path}: {exc}") from exc
    labels = _labels(artifacts)
    normed = [stats.normalize_times(a.times()) for a in artifacts]
    pooled = np.concatenate(normed)
    edges = stats.freedman_diaconis_edges(pooled) if bins is None else \
        stats.histogram(pooled, bins).bin_edges
    dens = [stats.histogram(v, edges, "density").density for v in normed]

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bin_left", "bin_right"] + labels)
    for i in range(edges.size - 1):
        w.writerow([repr(float(edges[i])), repr(float(edges[i + 1]))] + [repr(float(d[i])) for d in dens])
    hist_path = path / "hist.csv"
    _write(hist_path, buf.getvalue())

    xs = np.unique(pooled)
    cdfs = [np.searchsorted(np.sort(v), xs, side="right") / v.size for v in normed]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x"] + labels)
    for i, x in enumerate(xs):
        w.writerow([repr(float(x))] + [repr(float(c[i])) for c in cdfs])
    ecdf_path = path / "ecdf.csv"
    _write(ecdf_path, buf.getvalue())
    return hist_path, ecdf_path
