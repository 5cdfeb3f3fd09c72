"""Game loop, exact regret accounting, CSV emission, and sweeps.

Regret is anytime: after every round the competitor is recomputed exactly
for the prefix (losses are linear, so the closed-form ball minimizer does
the accounting; no inner numerical minimization anywhere). Each trace row
also carries the learner's theoretical bound at that prefix so conformance
is a column comparison.

CSV schema (bit-exact header):
run_id,learner,adversary,p,d,T,L,seed,t,regret,bound,eta,x_pnorm
with floats serialized as shortest round-trip decimals.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .adversaries import make_adversary
from .geometry import BallSpec, linear_minimizer_on_ball, lp_norm, sample_ball
from .learners import (
    ContractError,
    FTRLAdaptive,
    FTRLCoordwise,
    FTRLPower,
    OMDAdaptive,
    OMDPower,
)
from .regularizers import phi_eval
from .rng import stream

__all__ = [
    "RoundRecord",
    "RegretTrace",
    "BanditResult",
    "SweepConfig",
    "run_full_info",
    "run_bandit",
    "sweep",
    "make_learner",
    "write_trace_csv",
    "read_trace_csv",
    "load_sweep_config",
    "UniformRandomBandit",
    "OracleBandit",
    "LEARNER_IDS",
]

CSV_HEADER = "run_id,learner,adversary,p,d,T,L,seed,t,regret,bound,eta,x_pnorm"

# keep per-round vectors in the trace only below this d*(T+1) footprint
VECTOR_BUDGET = 2_000_000


class InfeasiblePointError(RuntimeError):
    def __init__(self, t: int, norm: float):
        super().__init__(f"learner emitted an infeasible point at round {t} (||x||_p = {norm:.12g})")
        self.round = t


@dataclass
class RoundRecord:
    t: int
    loss: float
    regret: float
    bound: float
    eta: float
    r: float
    x_pnorm: float
    gdual: float = math.nan
    phi_next_own: float = math.nan  # phi_{r_t}(x_{t+1})
    phi_next_new: float = math.nan  # phi_{r_{t+1}}(x_{t+1})


@dataclass
class RegretTrace:
    learner: str
    adversary: str
    spec: BallSpec
    T: int
    T_effective: int
    seed: int
    warnings: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    xs: list | None = None
    gs: list | None = None
    competitor: np.ndarray | None = None
    x_after: np.ndarray | None = None  # the point the learner would play next

    @property
    def regret(self) -> float:
        return self.rows[-1].regret if self.rows else 0.0

    @property
    def run_id(self) -> str:
        s = self.spec
        return f"{self.learner}_{self.adversary}_p{s.p}_d{s.d}_T{self.T}_L{s.L}_s{self.seed}"


def make_learner(learner_id: str, spec: BallSpec):
    """Build a learner from its registry id."""
    if learner_id == "ftrl-phi2":
        return FTRLPower(spec, 2.0)
    if learner_id == "ftrl-phip":
        return FTRLPower(spec, spec.p)
    if learner_id.startswith("ftrl-phir-"):
        return FTRLPower(spec, float(learner_id.removeprefix("ftrl-phir-")))
    if learner_id == "ftrl-adaptive":
        return FTRLAdaptive(spec)
    if learner_id == "ftrl-adaptive-2d":
        lrn = FTRLAdaptive(spec, threshold=2.0 * spec.d)
        lrn.learner_id = "ftrl-adaptive-2d"
        return lrn
    if learner_id == "ftrl-coordwise":
        return FTRLCoordwise.default_scales(spec)
    if learner_id == "omd-phi2":
        return OMDPower(spec, 2.0)
    if learner_id == "omd-phip":
        return OMDPower(spec, spec.p)
    if learner_id.startswith("omd-phir-"):
        return OMDPower(spec, float(learner_id.removeprefix("omd-phir-")))
    if learner_id == "omd-adaptive":
        return OMDAdaptive(spec)
    raise ContractError(f"unknown learner id {learner_id!r}")


LEARNER_IDS = (
    "ftrl-phi2",
    "ftrl-phip",
    "ftrl-adaptive",
    "ftrl-adaptive-2d",
    "ftrl-coordwise",
    "omd-phi2",
    "omd-phip",
    "omd-adaptive",
)


def run_full_info(learner, adversary, spec: BallSpec, T: int, seed: int = 0, keep_vectors: bool | None = None) -> RegretTrace:
    """Play T rounds: the learner commits x_t, then the round's subgradient
    is revealed. Deterministic given the adversary's seed."""
    if keep_vectors is None:
        keep_vectors = spec.d * (T + 1) <= VECTOR_BUDGET
    trace = RegretTrace(
        learner=learner.learner_id,
        adversary=adversary.kind,
        spec=spec,
        T=T,
        T_effective=adversary.T_effective,
        seed=seed,
        warnings=list(adversary.warnings),
    )
    if keep_vectors:
        trace.xs, trace.gs = [], []
    G = np.zeros(spec.d)
    cumloss = 0.0
    for t in range(1, T + 1):
        x = learner.act()
        xnorm = lp_norm(x, spec.p)
        if xnorm > 1.0 + 1e-9:
            raise InfeasiblePointError(t, xnorm)
        if trace.rows:
            prev = trace.rows[-1]
            prev.phi_next_own = float(phi_eval(prev.r, x))
            prev.phi_next_new = float(phi_eval(learner.current_r, x))
        g = adversary.gradient(t)
        loss = float(g @ x)
        cumloss += loss
        learner.observe(g)
        G += g
        _, comp = linear_minimizer_on_ball(G, spec)
        rstar = learner.current_r / (learner.current_r - 1.0)
        trace.rows.append(
            RoundRecord(
                t=t,
                loss=loss,
                regret=cumloss - comp,
                bound=learner.bound(t),
                eta=learner.current_eta,
                r=learner.current_r,
                x_pnorm=xnorm,
                gdual=lp_norm(g, rstar),
            )
        )
        if keep_vectors:
            trace.xs.append(x)
            trace.gs.append(g)
    x_after = learner.act()
    if trace.rows:
        last = trace.rows[-1]
        last.phi_next_own = float(phi_eval(last.r, x_after))
        last.phi_next_new = float(phi_eval(learner.current_r, x_after))
    trace.x_after = x_after if keep_vectors else None
    trace.competitor = linear_minimizer_on_ball(G, spec)[0]
    return trace


# ---------------------------------------------------------------------------
# bandit play


class UniformRandomBandit:
    """Plays uniform draws from the ball; ignores the feedback."""

    learner_id = "uniform-random"

    def __init__(self, spec: BallSpec, rng: np.random.Generator):
        self.spec = spec
        self.rng = rng

    def act(self) -> np.ndarray:
        return sample_ball(self.spec, 1, self.rng)[0]

    def observe_value(self, value: float):
        pass


class OracleBandit:
    """Plays the environment's own competitor; the zero-pseudo-regret
    control case."""

    learner_id = "oracle"

    def __init__(self, env):
        self.env = env

    def act(self) -> np.ndarray:
        return self.env.competitor_x

    def observe_value(self, value: float):
        pass


def make_bandit_learner(learner_id: str, spec: BallSpec, env, seed: int, trial: int):
    if learner_id == "uniform-random":
        return UniformRandomBandit(spec, stream(seed, 2, trial))
    if learner_id == "oracle":
        return OracleBandit(env)
    raise ContractError(f"unknown bandit learner id {learner_id!r}")


@dataclass
class BanditResult:
    trials: int
    mean: float
    stderr: float
    per_trial: np.ndarray
    budget_violations: int  # trials where some ||g_t||_{p*} exceeded L
    warnings: list


def run_bandit(env_family, learner_id: str, trials: int, seed: int = 0) -> BanditResult:
    """Monte-Carlo pseudo-regret of a scalar-feedback learner.

    Each trial spawns an independent environment; the per-trial statistic is
    the realized cumulative loss minus T times the competitor's expected
    per-round loss, an unbiased estimate of pseudo-regret.
    """
    if trials < 1:
        raise ContractError("trials must be >= 1")
    spec, T = env_family.spec, env_family.T
    values = np.zeros(trials)
    violations = 0
    for trial in range(trials):
        env = env_family.spawn(trial)
        learner = make_bandit_learner(learner_id, spec, env, seed, trial) if isinstance(learner_id, str) else learner_id(env, trial)
        if not hasattr(learner, "observe_value"):
            raise ContractError("bandit play requires a scalar-feedback learner")
        total = 0.0
        for _ in range(T):
            x = learner.act()
            fb = env.step(x)
            learner.observe_value(fb)
            total += fb
        values[trial] = total - T * env.expected_round_loss
        if env.max_gnorm > spec.L * (1.0 + 1e-9):
            violations += 1
    mean = float(values.mean()) if trials else 0.0
    stderr = float(values.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return BanditResult(trials, mean, stderr, values, violations, list(env_family.warnings))


# ---------------------------------------------------------------------------
# CSV emission


def _fmt(v: float) -> str:
    return repr(float(v))


def trace_csv_lines(trace: RegretTrace, final_only: bool = False):
    s = trace.spec
    rid = trace.run_id
    rows = trace.rows[-1:] if final_only else trace.rows
    for row in rows:
        yield (
            f"{rid},{trace.learner},{trace.adversary},{_fmt(s.p)},{s.d},{trace.T},"
            f"{_fmt(s.L)},{trace.seed},{row.t},{_fmt(row.regret)},{_fmt(row.bound)},"
            f"{_fmt(row.eta)},{_fmt(row.x_pnorm)}"
        )


def write_trace_csv(traces, path: str, final_only: bool = False):
    if isinstance(traces, RegretTrace):
        traces = [traces]
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for trace in traces:
            for line in trace_csv_lines(trace, final_only=final_only):
                fh.write(line + "\n")


def read_trace_csv(path: str):
    """Parse an emitted file back to per-row dicts (floats round-trip)."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ContractError(f"unexpected CSV header: {header!r}")
        names = header.split(",")
        rows = []
        for line in fh:
            parts = line.strip().split(",")
            rec = dict(zip(names, parts))
            for key in ("p", "L", "regret", "bound", "eta", "x_pnorm"):
                rec[key] = float(rec[key])
            for key in ("d", "T", "seed", "t"):
                rec[key] = int(rec[key])
            rows.append(rec)
    return rows


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepConfig:
    learner: list[str]
    adversary: str
    p: float
    d: list[int]
    horizon: int
    lipschitz: float = 1.0
    seed: int = 0
    seeds: int = 1
    out: str = "sweep.csv"


def load_sweep_config(path: str) -> SweepConfig:
    """Flat `key = value` lines; keys are the CLI flag names. Lists are
    comma-separated."""
    raw = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ContractError(f"bad config line: {line!r}")
            key, value = line.split("=", 1)
            raw[key.strip()] = value.strip()
    try:
        return SweepConfig(
            learner=[s.strip() for s in raw["learner"].split(",") if s.strip()],
            adversary=raw["adversary"],
            p=float(raw["p"]),
            d=[int(s) for s in raw["d"].split(",") if s.strip()],
            horizon=int(raw["horizon"]),
            lipschitz=float(raw.get("lipschitz", "1.0")),
            seed=int(raw.get("seed", "0")),
            seeds=int(raw.get("seeds", "1")),
            out=raw.get("out", "sweep.csv"),
        )
    except KeyError as exc:
        raise ContractError(f"sweep config is missing key {exc.args[0]!r}") from exc


def _run_cell(cell):
    learner_id, adversary_id, p, d, T, L, seed = cell
    spec = BallSpec(d=d, p=p, L=L)
    learner = make_learner(learner_id, spec)
    adversary = make_adversary(adversary_id, spec, T, seed=seed, schedule_view=learner.schedule_view())
    return run_full_info(learner, adversary, spec, T, seed=seed)


def sweep(config: SweepConfig) -> str:
    """One trace per (learner, d, seed) cell, appended in cell order so the
    output is deterministic regardless of worker count."""
    if not config.d or not config.learner:
        raise ContractError("sweep grid must be nonempty")
    if config.seeds < 1:
        raise ContractError("seeds must be >= 1")
    cells = [
        (lid, config.adversary, config.p, d, config.horizon, config.lipschitz, config.seed + i)
        for lid in config.learner
        for d in config.d
        for i in range(config.seeds)
    ]
    threads = max(1, int(os.environ.get("OCO_LAB_THREADS", "1")))
    if threads == 1:
        traces = [_run_cell(c) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            traces = list(pool.map(_run_cell, cells))
    write_trace_csv(traces, config.out, final_only=True)
    return config.out
