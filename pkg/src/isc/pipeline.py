"""End-to-end run: collect candidate j-invariants, certify each non-CM one for
every prime in (37, p_max], record small-p evidence, write the report."""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import canonical_j_id, parse_rational, primes_up_to
from .curves import BSGS_THRESHOLD, TraceCache
from .galois import certify_surjective, evidence_profile
from .modcurve import GENUS_ZERO, enumerate_integral_j, is_cm, known_sets

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2

DEFAULT_TRACE_CACHE = "./traces.txt"
TRACE_CACHE_ENV = "ISC_TRACE_CACHE"


@dataclass
class RunConfig:
    p_min: int = 38
    p_max: int = 500
    ell_bound: int = 10**4
    trace_cache_path: str | None = DEFAULT_TRACE_CACHE
    output_path: str | None = None
    output_format: str = "json"
    bsgs_threshold: int = BSGS_THRESHOLD
    jobs: int = 1

    def __post_init__(self):
        if not 37 < self.p_min <= self.p_max:
            raise ValueError(f"need 37 < p_min <= p_max, got {self.p_min}, {self.p_max}")
        if self.ell_bound < 100:
            raise ValueError("ell_bound must be at least 100")
        if self.output_format not in ("json", "csv"):
            raise ValueError(f"unknown output format {self.output_format!r}")

    def primes(self) -> list[int]:
        return [p for p in primes_up_to(self.p_max) if p >= self.p_min]

    def to_dict(self) -> dict:
        # paths are left out so reports from different directories compare equal
        return {
            "p_min": str(self.p_min),
            "p_max": str(self.p_max),
            "ell_bound": str(self.ell_bound),
            "bsgs_threshold": str(self.bsgs_threshold),
        }


@dataclass
class JRecord:
    j: Fraction
    source_r: tuple[int, ...]
    cm: bool
    certified_primes: list[int] = field(default_factory=list)
    inconclusive_primes: list[int] = field(default_factory=list)
    # p -> {"missing": [...], "witnessing_l": [...], "scanned_bound": l}
    small_p_evidence: dict[int, dict] = field(default_factory=dict)
    # p -> (l_split, l_nonsplit, l_exceptional); None where not found
    witnessing_ell: dict[int, tuple] = field(default_factory=dict)

    @property
    def status(self) -> str:
        if self.cm:
            return "cm-skipped"
        return "inconclusive" if self.inconclusive_primes else "certified"

    def to_dict(self) -> dict:
        s = lambda x: None if x is None else str(x)  # noqa: E731
        return {
            "j": str(self.j),
            "source_r": [str(r) for r in self.source_r],
            "cm": self.cm,
            "status": self.status,
            "certified_primes": [str(p) for p in self.certified_primes],
            "inconclusive_primes": [str(p) for p in self.inconclusive_primes],
            "small_p_evidence": {
                str(p): {
                    "missing": list(ev["missing"]),
                    "witnessing_l": [s(x) for x in ev["witnessing_l"]],
                    "scanned_bound": str(ev["scanned_bound"]),
                }
                for p, ev in sorted(self.small_p_evidence.items())
            },
            "witnessing_l": {str(p): [s(x) for x in ells] for p, ells in sorted(self.witnessing_ell.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "JRecord":
        i = lambda x: None if x is None else int(x)  # noqa: E731
        return cls(
            j=parse_rational(d["j"]),
            source_r=tuple(int(r) for r in d["source_r"]),
            cm=d["cm"],
            certified_primes=[int(p) for p in d["certified_primes"]],
            inconclusive_primes=[int(p) for p in d["inconclusive_primes"]],
            small_p_evidence={
                int(p): {
                    "missing": list(ev["missing"]),
                    "witnessing_l": tuple(i(x) for x in ev["witnessing_l"]),
                    "scanned_bound": int(ev["scanned_bound"]),
                }
                for p, ev in d["small_p_evidence"].items()
            },
            witnessing_ell={int(p): tuple(i(x) for x in v) for p, v in d["witnessing_l"].items()},
        )


@dataclass
class CertReport:
    config: dict
    candidates: list[JRecord] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return all(not rec.inconclusive_primes for rec in self.candidates if not rec.cm)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.verified else EXIT_INCONCLUSIVE

    def to_dict(self) -> dict:
        return {
            "config": dict(self.config),
            "candidate_count": str(len(self.candidates)),
            "cm_count": str(sum(rec.cm for rec in self.candidates)),
            "verified": self.verified,
            "candidates": [rec.to_dict() for rec in self.candidates],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CertReport":
        return cls(dict(d["config"]), [JRecord.from_dict(c) for c in d["candidates"]])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "source_r", "p", "status", "l_split", "l_nonsplit", "l_exceptional"])
        for rec in self.candidates:
            if rec.cm:
                continue
            rows = [(p, "certified") for p in rec.certified_primes]
            rows += [(p, "inconclusive") for p in rec.inconclusive_primes]
            for p, status in sorted(rows):
                ells = rec.witnessing_ell.get(p, (None, None, None))
                w.writerow([str(rec.j), " ".join(map(str, rec.source_r)), p, status,
                            *("" if x is None else x for x in ells)])
        return buf.getvalue()


def collect_candidate_j() -> list[tuple[Fraction, tuple[int, ...]]]:
    """Union of the integral genus-zero sets and the three known sets, each j
    tagged with every isogeny degree it came from; sorted by j."""
    sources: dict[Fraction, set[int]] = {}
    for r in GENUS_ZERO:
        for v in enumerate_integral_j(r).values:
            sources.setdefault(Fraction(v), set()).add(r)
    for r, vals in known_sets().items():
        for v in vals:
            sources.setdefault(v, set()).add(r)
    return [(j, tuple(sorted(rs))) for j, rs in sorted(sources.items())]


def _state_ells(state) -> tuple:
    return (state.found_split_ev, state.found_nonsplit_ev, state.found_exceptional_ev)


def process_candidate(j: Fraction, sources: tuple[int, ...], cfg: RunConfig,
                      cache: TraceCache) -> JRecord:
    rec = JRecord(j, sources, is_cm(j))
    if rec.cm:
        return rec
    for p in cfg.primes():
        state = certify_surjective(j, p, cfg.ell_bound, cache, cfg.bsgs_threshold)
        rec.witnessing_ell[p] = _state_ells(state)
        (rec.certified_primes if state.complete else rec.inconclusive_primes).append(p)
    # the witness criteria need p >= 5, so degrees 2 and 3 get no evidence entry
    for r in sources:
        if 5 <= r <= 37:
            state = evidence_profile(j, r, cfg.ell_bound, cache, cfg.bsgs_threshold)
            rec.small_p_evidence[r] = {
                "missing": [w.value for w in state.missing()],
                "witnessing_l": _state_ells(state),
                "scanned_bound": state.scanned_bound,
            }
    return rec


def _worker(args):
    j, sources, cfg, known = args
    cache = TraceCache(None)
    cache.seed(canonical_j_id(j), known)
    rec = process_candidate(j, sources, cfg, cache)
    return rec, [(r.ell, r.a_ell) for r in cache.pending()]


def verify_theorem(cfg: RunConfig, cache: TraceCache | None = None) -> CertReport:
    """Certify every non-CM candidate for every prime p in [p_min, p_max].

    New traces are appended to the cache in candidate order, then ell order,
    so cold runs write identical cache files whatever ``cfg.jobs`` is.
    """
    if cache is None:
        cache = TraceCache(cfg.trace_cache_path)
    cache.check_writable()
    candidates = collect_candidate_j()
    log.info("%d candidate j-invariants, %d primes in range", len(candidates), len(cfg.primes()))
    jobs = [(j, srcs, cfg, cache.traces_for(canonical_j_id(j))) for j, srcs in candidates]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            results = list(pool.map(_worker, jobs))
    else:
        results = [_worker(job) for job in jobs]
    report = CertReport(cfg.to_dict())
    for (j, _), (rec, new) in zip(candidates, results):
        j_id = canonical_j_id(j)
        for ell, a in new:
            cache.put(j_id, ell, a)
        report.candidates.append(rec)
        log.info("j=%s %s", rec.j, rec.status)
    cache.flush()
    return report


def write_report(report: CertReport, cfg: RunConfig):
    """Write the report to cfg.output_path via a temp file and rename."""
    text = report.to_json() if cfg.output_format == "json" else report.to_csv()
    path = cfg.output_path
    if path is None:
        raise ValueError("no output path configured")
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".report-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_report(path) -> CertReport:
    with open(path) as fh:
        return CertReport.from_dict(json.load(fh))


def witness_summary(state) -> dict:
    return {
        "p": str(state.p),
        "certified": state.complete,
        "witnessing_l": {w.value: (None if ell is None else str(ell)) for w, ell in state.witnesses().items()},
        "missing": [w.value for w in state.missing()],
        "scanned_bound": str(state.scanned_bound),
    }
