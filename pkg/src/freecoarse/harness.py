"""Named verification suites, their configuration, and report emission.

Every suite returns a :class:`SuiteReport`.  Reports are deterministic given
the configuration and seed; wall-clock time is kept out of ``report.json``
and written to ``timing.json`` next to it.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import random
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Optional

from .coarse import (
    Filtration,
    Report,
    bounded_filtration,
    grid_filtration,
    l1_filtration,
    path_filtration,
    table_filtration,
    MetricError,
)
from .free import (
    EXACT,
    FreeCoarseConfig,
    ap_norm_oracle,
    ap_norm_tjoin,
    augmentation_obstruction_check,
    ball_growth,
    boundedness_growth,
    certificate_product,
    one_point_norms,
    pullback_base,
    random_words,
    restriction_check,
    universal_extension_check,
    word_norm_bounds,
    y_base,
)
from .groups import (
    AbelianExpP,
    AllGroups,
    ApElement,
    FlipElement,
    ReducedWord,
    all_ap_elements,
    all_flip_elements,
    all_flip_vectors,
    ap_ops,
    format_ap,
    format_word,
)
from .ideals import (
    all_subsets_base,
    check_ideal_axioms,
    check_invariance,
    check_left_coarse,
    check_monotone,
    check_right_coarse,
    extend_ideal_abelian,
    finite_sets_base,
    flip_example_base,
    flip_obstruction_check,
    left_shift_action,
)

log = logging.getLogger(__name__)

OUT_ENV = "FREECOARSE_OUT"
DEFAULT_OUT = "freecoarse-out"


class ConfigError(ValueError):
    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


@dataclass
class SpaceConfig:
    kind: str = "path"
    size: int = 8
    rows: int = 3
    cols: int = 3
    points: Optional[list] = None
    metric: Optional[list] = None
    p: int = 2
    z: int = 0
    variety: str = "abelian"
    max_grade: int = 6
    max_conj_len: int = 3
    seed: int = 0
    explicit_space: bool = False

    @classmethod
    def from_dict(cls, data: dict) -> "SpaceConfig":
        if not isinstance(data, dict):
            raise ConfigError("$", "config must be an object")
        out = cls()
        known = {f.name for f in fields(cls)} - {"explicit_space"}
        flat = dict(data)
        space = flat.pop("space", None)
        limits = flat.pop("limits", None)
        if space is not None:
            if not isinstance(space, dict):
                raise ConfigError("$.space", "must be an object")
            for k, v in space.items():
                if k not in ("kind", "size", "rows", "cols", "points", "metric"):
                    raise ConfigError(f"$.space.{k}", "unknown field")
                setattr(out, k, v)
            out.explicit_space = True
        if limits is not None:
            for k, v in limits.items():
                if k not in ("max_grade", "max_conj_len"):
                    raise ConfigError(f"$.limits.{k}", "unknown field")
                setattr(out, k, v)
        for k, v in flat.items():
            if k not in known:
                raise ConfigError(f"$.{k}", "unknown field")
            setattr(out, k, v)
            if k in ("kind", "size", "rows", "cols", "points", "metric"):
                out.explicit_space = True
        out.validate()
        return out

    def validate(self) -> None:
        for name in ("size", "rows", "cols", "p", "z", "max_grade", "max_conj_len", "seed"):
            if not isinstance(getattr(self, name), int) or isinstance(getattr(self, name), bool):
                raise ConfigError(f"$.{name}", "must be an integer")
        if self.kind not in ("path", "grid", "points", "bounded"):
            raise ConfigError("$.space.kind", f"unknown space kind {self.kind!r}")
        try:
            AbelianExpP(self.p)
        except ValueError as exc:
            raise ConfigError("$.p", str(exc)) from None
        if self.variety not in ("abelian", "all"):
            raise ConfigError("$.variety", "must be 'abelian' or 'all'")
        if self.max_grade < 1 or self.max_conj_len < 0:
            raise ConfigError("$.limits", "search limits must be positive")
        if self.kind == "points" and not self.points:
            raise ConfigError("$.space.points", "required for kind 'points'")
        n = len(self.build_space().window)
        if not 0 <= self.z < n:
            raise ConfigError("$.z", f"index outside window of {n} points")

    def build_space(self) -> Filtration:
        try:
            if self.kind == "path":
                return path_filtration(self.size)
            if self.kind == "grid":
                return grid_filtration(self.rows, self.cols)
            if self.kind == "bounded":
                return bounded_filtration(self.size)
            if self.metric is not None:
                pts = list(range(len(self.points)))
                return table_filtration(pts, self.metric, [f"x{i}" for i in pts])
            return l1_filtration(self.points)
        except MetricError as exc:
            raise ConfigError("$.space.metric", str(exc)) from None
        except (TypeError, ValueError) as exc:
            raise ConfigError("$.space", str(exc)) from None

    def free_config(self, F: Optional[Filtration] = None) -> FreeCoarseConfig:
        F = self.build_space() if F is None else F
        variety = AbelianExpP(self.p) if self.variety == "abelian" else AllGroups()
        return FreeCoarseConfig(
            F, F.window.points[self.z], variety, self.max_grade, self.max_conj_len, shadow_p=self.p
        )

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def load_config(path: Optional[str], overrides: Optional[dict] = None) -> SpaceConfig:
    """Defaults, then the JSON file, then non-``None`` overrides."""
    data: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(str(path), "config file not found") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    for k, v in (overrides or {}).items():
        if v is not None:
            data[k] = v
    return SpaceConfig.from_dict(data)


@dataclass
class SuiteReport:
    suite: str
    checks: list
    seed: int
    tables: dict = field(default_factory=dict)
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    return str(obj)


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\r\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def write_report(report: SuiteReport, out_dir: Path) -> Path:
    target = Path(out_dir) / report.suite
    target.mkdir(parents=True, exist_ok=True)
    (target / "report.json").write_text(report.to_json())
    for name, rows in report.tables.items():
        (target / f"{name}.csv").write_text(rows_to_csv(rows), newline="")
    (target / "timing.json").write_text(json.dumps({"wall_clock_s": round(report.wall_clock, 3)}) + "\n")
    return target


def _norm_row(element: str, res) -> dict:
    return {"element": element, "r": res.radius, "n_lo": res.lo, "n_hi": res.hi, "method": res.method}


def _expect_failure(name: str, rep: Report, rng=None) -> Report:
    """Pass when ``rep`` failed with a witness: the expected counterexample was found."""
    ok = (not rep.passed) and rep.witness is not None
    return Report(name, ok, rep.tested_range if rng is None else rng, rep.exhaustive, rep.witness if ok else None,
                  details={"underlying": rep.name, "underlying_status": "fail" if not rep.passed else "pass"})


# --- scenarios ---------------------------------------------------------------------------


def _restriction_scenarios(cfg: SpaceConfig):
    if cfg.explicit_space:
        F = cfg.build_space()
        return [(cfg.kind, F, F.window.points[cfg.z], [cfg.p])]
    return [
        ("path8", path_filtration(8), 0, [2, 3]),
        ("grid3x3", grid_filtration(3, 3), (0, 0), [2, 3]),
    ]


def random_l1_points(n: int, side: int, seed: int) -> list[tuple]:
    rng = random.Random(seed)
    cells = [(i, j) for i in range(side) for j in range(side)]
    return sorted(rng.sample(cells, n))


def _tjoin_scenarios(cfg: SpaceConfig):
    if cfg.explicit_space:
        F = cfg.build_space()
        return [(cfg.kind, F, F.window.points[cfg.z])]
    out = [("path12", path_filtration(12), 0), ("grid3x4", grid_filtration(3, 4), (0, 0))]
    for k in range(3):
        pts = random_l1_points(12, 5, cfg.seed * 1000 + k)
        F = l1_filtration(pts)
        out.append((f"random{k}", F, F.window.points[0]))
    return out


# --- suites ---------------------------------------------------------------------------------


def suite_restriction(cfg: SpaceConfig) -> SuiteReport:
    checks, rows = [], []
    n_max = 8
    for name, F, z, primes in _restriction_scenarios(cfg):
        for p in primes:
            fc = FreeCoarseConfig(F, z, AbelianExpP(p))
            rep = restriction_check(F, fc, n_max, [1, 2, 3])
            table = rep.details.pop("table", [])
            for a, r, res in table:
                rows.append({"space": name, "p": p, **_norm_row(format_ap(a, F.window), res)})
            checks.append(replace(rep, name=f"restriction/{name}/p={p}"))
    return SuiteReport("restriction", checks, cfg.seed, {"norms": rows})


def suite_oracle_vs_tjoin(cfg: SpaceConfig) -> SuiteReport:
    checks = []
    for name, F, z in _tjoin_scenarios(cfg):
        fc = FreeCoarseConfig(F, z, AbelianExpP(2))
        elements = all_ap_elements(F.window, 2)
        witness = None
        exact = 0
        for r in (1, 2):
            for a in elements:
                o, t = ap_norm_oracle(a, r, fc), ap_norm_tjoin(a, r, fc)
                if (o.status, o.lo) != (t.status, t.lo):
                    witness = {"element": format_ap(a, F.window), "r": r, "oracle": o.lo, "tjoin": t.lo}
                    break
                exact += o.status == EXACT
            if witness:
                break
        checks.append(
            Report(
                f"oracle-vs-tjoin/{name}",
                witness is None,
                {"points": len(F.window), "elements": len(elements), "radii": [1, 2]},
                witness=witness,
                details={"exact_norms": exact},
            )
        )
    return SuiteReport("oracle-vs-tjoin", checks, cfg.seed)


def _singleton_coverage(B, elements) -> Report:
    top = B.grades[-1]
    missing = next((a for a in elements if not B.member(a, top)), None)
    return Report(
        "y-base/covers-singletons",
        missing is None,
        {"elements": len(elements), "grade": list(top)},
        witness=None if missing is None else {"uncovered": str(missing)},
    )


def suite_ideal_axioms(cfg: SpaceConfig) -> SuiteReport:
    F = cfg.build_space() if cfg.explicit_space else path_filtration(8)
    z = F.window.points[cfg.z]
    p = cfg.p if cfg.explicit_space else 2
    fc = FreeCoarseConfig(F, z, AbelianExpP(p))
    B = y_base(fc, radii=(1, 2), max_grade=3)
    elements = all_ap_elements(F.window, p)
    checks = [
        # a truncated Y-base cannot cover far singletons; coverage is checked on a taller one
        replace(check_ideal_axioms(B, elements, exhaustive=True, coverage=False), name="y-base/difference-closure"),
        _singleton_coverage(y_base(fc, radii=(1,), max_grade=len(F.window)), elements),
        replace(check_monotone(B, elements), name="y-base/monotone"),
        replace(check_ideal_axioms(finite_sets_base(F.window, p), elements, exhaustive=True), name="finite-sets"),
        replace(check_ideal_axioms(all_subsets_base(ap_ops(p)), elements, exhaustive=True), name="all-subsets"),
    ]
    return SuiteReport("ideal-axioms", checks, cfg.seed)


def suite_augmentation_obstruction(cfg: SpaceConfig) -> SuiteReport:
    checks = []
    for name, F, z, primes in _restriction_scenarios(cfg):
        for p in primes:
            rep = augmentation_obstruction_check(F, p, z, [1, 2, 3])
            checks.append(replace(rep, name=f"augmentation/{name}/p={p}"))
    return SuiteReport("augmentation-obstruction", checks, cfg.seed)


def suite_coarse_group_sides(cfg: SpaceConfig) -> SuiteReport:
    rng = random.Random(cfg.seed)
    F = path_filtration(6)
    fc = FreeCoarseConfig(F, 0, AbelianExpP(2))
    B = y_base(fc, radii=(1, 2), max_grade=3)
    G = all_ap_elements(F.window, 2)
    action = left_shift_action(G, B.ops)
    xs = rng.sample(G, 12)
    gs = rng.sample(G, 12)
    left = check_left_coarse(B, action, xs=xs, gs=gs)
    right = check_right_coarse(B, action, xs=xs, gs=gs)
    checks = [
        replace(left, name="abelian/left-coarse", passed=left.passed and left.details["same_grade"]),
        replace(right, name="abelian/right-coarse", passed=right.passed and right.details["same_grade"]),
    ]

    P = pullback_base(replace(fc, variety=AllGroups()), radii=(1, 2), max_grade=3)
    words = random_words(F.window, 40, 6, cfg.seed + 1)
    conj = [w for w in random_words(F.window, 20, 4, cfg.seed + 2)]
    inv = check_invariance(P, words, conj)
    checks.append(replace(inv, name="pullback/invariance", passed=inv.passed and inv.details["same_grade"]))

    N = 4
    H = flip_example_base(N)
    phi = FlipElement.phi(N)
    elements = all_flip_elements(N)
    conjugators = [phi] + rng.sample(elements, 4)
    checks.append(_expect_failure("flip/invariance-refuted", check_invariance(H, all_flip_vectors(N), conjugators)))
    flip_action = left_shift_action(elements, H.ops)
    fx = [FlipElement.identity(N)] + rng.sample(elements, 3)
    fg = [phi] + rng.sample(elements, 3)
    checks.append(_expect_failure("flip/left-coarse-refuted", check_left_coarse(H, flip_action, xs=fx, gs=fg)))
    fright = check_right_coarse(H, flip_action, xs=fx, gs=fg)
    checks.append(replace(fright, name="flip/right-coarse", passed=fright.passed and fright.details["same_grade"]))
    checks.append(replace(flip_obstruction_check(N), name="flip/obstruction"))
    return SuiteReport("coarse-group-sides", checks, cfg.seed)


def suite_flip_obstruction(cfg: SpaceConfig) -> SuiteReport:
    rep = flip_obstruction_check(4)
    return SuiteReport("flip-obstruction", [replace(rep, name="flip-obstruction/N=4")], cfg.seed)


def extension_setup():
    """``G = A_2`` over six points, ``H`` the span of the first three."""
    F3 = path_filtration(3)
    inner = y_base(FreeCoarseConfig(F3, 0, AbelianExpP(2)), radii=(1, 2), max_grade=2)
    F6 = path_filtration(6)
    G = all_ap_elements(F6.window, 2)
    in_H = lambda a: all(x < 3 for x in a.support)
    # coset representatives first so small prefixes already reach every coset
    G_ordered = sorted(G, key=lambda a: (not all(x >= 3 for x in a.support), a.encode(F6.window)))
    ext = extend_ideal_abelian(inner, G_ordered, in_H, max_m=8)
    return inner, ext, G, in_H


def suite_subgroup_extension(cfg: SpaceConfig) -> SuiteReport:
    inner, ext, G, in_H = extension_setup()
    mismatch = None
    for a in G:
        for g in inner.grades:
            expected = in_H(a) and inner.member(a, g)
            if ext.member(a, (0, g)) != expected:
                mismatch = {"element": str(a), "grade": list(g)}
                break
        if mismatch:
            break
    checks = [
        Report("extension/restriction-m0", mismatch is None, {"elements": len(G), "grades": len(inner.grades)}, witness=mismatch),
        replace(check_ideal_axioms(ext, G, exhaustive=True), name="extension/ideal-axioms"),
    ]
    return SuiteReport("subgroup-extension", checks, cfg.seed)


def seeded_path_maps(source: Filtration, target: Filtration, count: int, seed: int) -> list[dict]:
    """Random 1-Lipschitz walks ``x_i -> x_{phi(i)}`` into the target window's generators."""
    rng = random.Random(seed)
    n = len(target.window)
    maps = []
    for _ in range(count):
        pos = rng.randrange(n)
        f = {}
        for x in source.window:
            f[x] = ApElement.gen(target.window.points[pos], 2)
            pos = min(n - 1, max(0, pos + rng.choice((-1, 0, 1))))
        maps.append(f)
    return maps


def suite_universal_property(cfg: SpaceConfig) -> SuiteReport:
    source = path_filtration(8)
    target = path_filtration(6)
    fc = FreeCoarseConfig(source, 0, AbelianExpP(2))
    T = y_base(FreeCoarseConfig(target, 0, AbelianExpP(2)), radii=(1, 2, 3), max_grade=12)
    checks = []
    for k, f in enumerate(seeded_path_maps(source, target, 5, cfg.seed)):
        rep = universal_extension_check(f, fc, T, 4, [1, 2])
        rep.details["map"] = {str(x): format_ap(f[x], target.window) for x in source.window}
        checks.append(replace(rep, name=f"universal/map{k}"))
    return SuiteReport("universal-property", checks, cfg.seed)


def suite_bounded_growth(cfg: SpaceConfig) -> SuiteReport:
    rows = boundedness_growth(range(1, 6), p=2)
    bad = [r for r in rows if not (r["full_support_norm"] == r["m"] == r["max_norm"])]
    checks = [
        Report("growth/max-norm-equals-m", not bad, {"m": [1, 5]}, witness=bad[0] if bad else None, details={"rows": len(rows)})
    ]
    for p in (2, 3):
        norms = one_point_norms(p)
        checks.append(
            Report(f"growth/one-point/p={p}", max(norms) <= 1, {"elements": p}, details={"norms": norms})
        )
    return SuiteReport("bounded-growth", checks, cfg.seed, {"growth": rows})


def suite_word_sandwich(cfg: SpaceConfig) -> SuiteReport:
    F = path_filtration(6)
    fc = FreeCoarseConfig(F, 0, AllGroups(), max_grade=cfg.max_grade, max_conj_len=cfg.max_conj_len, shadow_p=2)
    words = random_words(F.window, 50, 6, cfg.seed)
    rows = []
    order_bad = cert_bad = None
    for w in words:
        res = word_norm_bounds(w, 1, fc)
        rows.append(_norm_row(format_word(w, F.window), res))
        if res.hi is not None and not res.lo <= res.hi:
            order_bad = order_bad or {"word": format_word(w, F.window), "lo": res.lo, "hi": res.hi}
        if res.factors is not None and certificate_product(res, F.window) != w:
            cert_bad = cert_bad or {"word": format_word(w, F.window)}
    adjacent_bad = None
    count = 0
    for x, y in F.levels(1).pairs():
        if x == y:
            continue
        w = ReducedWord(((x, 1), (y, -1)))
        res = word_norm_bounds(w, 1, fc)
        count += 1
        if (res.status, res.lo) != (EXACT, 1):
            adjacent_bad = adjacent_bad or {"word": format_word(w, F.window), "result": res.to_dict()}
    found = sum(r["n_hi"] is not None for r in rows)
    rng = {"words": len(words), "max_len": 6, "r": 1, "max_grade": fc.max_grade, "max_conj_len": fc.max_conj_len}
    checks = [
        Report("sandwich/lower-le-upper", order_bad is None, rng, False, order_bad, {"upper_found": found}),
        Report("sandwich/certificates", cert_bad is None, rng, False, cert_bad),
        Report("sandwich/adjacent-exact-1", adjacent_bad is None, {"pairs": count}, True, adjacent_bad),
    ]
    return SuiteReport("word-sandwich", checks, cfg.seed, {"word_norms": rows})


SUITES: dict[str, tuple[Callable[[SpaceConfig], SuiteReport], str]] = {
    "restriction": (suite_restriction, "norm(x-y) <= n iff (x,y) in level^n, exhaustive"),
    "oracle-vs-tjoin": (suite_oracle_vs_tjoin, "BFS oracle equals T-join norm on every element (p=2)"),
    "ideal-axioms": (suite_ideal_axioms, "difference closure at grade (n+n', r+r'), exhaustive"),
    "augmentation-obstruction": (suite_augmentation_obstruction, "nonzero augmentation never enters Y_n unshifted"),
    "coarse-group-sides": (suite_coarse_group_sides, "left/right coarse-group checks; flip base refuted"),
    "flip-obstruction": (suite_flip_obstruction, "H_0 + phi H_0 phi covers the truncated H"),
    "subgroup-extension": (suite_subgroup_extension, "extension of an ideal from H to abelian G"),
    "universal-property": (suite_universal_property, "extended homomorphisms admit a modulus"),
    "bounded-growth": (suite_bounded_growth, "bounded 2m-point space: maximal norm equals m"),
    "word-sandwich": (suite_word_sandwich, "word-norm lower/upper bounds and certificates"),
}


def run_suite(name: str, cfg: SpaceConfig) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(SUITES)}")
    fn, _ = SUITES[name]
    t0 = time.perf_counter()
    report = fn(cfg)
    report.wall_clock = time.perf_counter() - t0
    log.info("suite %s: %s in %.2fs", name, "pass" if report.passed else "FAIL", report.wall_clock)
    return report


def ball_growth_csv(cfg: SpaceConfig, radii, max_n: int) -> str:
    rows = ball_growth(cfg.free_config(), radii, max_n)
    return rows_to_csv(rows)
