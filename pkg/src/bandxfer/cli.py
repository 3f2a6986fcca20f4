"""Command-line orchestration: `bandxfer <command> --config <file> --output <dir>`.

The config is a flat JSON object.  Library modules are imported after the
thread-count variables are set, so BANDXFER_THREADS reaches the BLAS pool.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

COMMANDS = ("crossover", "transfer-spectrum", "angular-check", "susy-check", "density-check")
ENGINES = ("polar", "cartesian", "both")
THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


class ConfigError(ValueError):
    """Invalid or unknown configuration entry."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int = 4
    W: float = 2.0
    E: float = 0.0
    seed: int = 0
    xis: tuple = (0.25, 0.5, 1.0, 2.0)
    samples: int = 1000
    engine: str = "both"
    output: str = "."
    perAxisOrder: int = 24
    jMax: int = 8
    taylorOrder: int = 6
    howMany: int = 4
    regimeC: float = 1.0
    singlePrecision: bool = False
    bins: int = 100
    angularT: tuple = (0.5, 2.0, 10.0, 50.0)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.engine not in ENGINES:
            raise ConfigError(f"unknown engine {self.engine!r}")
        object.__setattr__(self, "xis", tuple(float(x) for x in self.xis))
        object.__setattr__(self, "angularT", tuple(float(x) for x in self.angularT))
        if self.samples < 1 or self.howMany < 2 or self.bins < 1:
            raise ConfigError("samples >= 1, howMany >= 2 and bins >= 1 required")

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(d) - set(known))
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        if "command" not in d:
            raise ConfigError("missing key 'command'")
        out = {}
        for k, v in d.items():
            typ = known[k].type
            try:
                if typ == "int":
                    if isinstance(v, bool) or int(v) != v:
                        raise TypeError
                    v = int(v)
                elif typ == "float":
                    if isinstance(v, bool):
                        raise TypeError
                    v = float(v)
                elif typ == "bool":
                    if not isinstance(v, bool):
                        raise TypeError
                elif typ == "tuple":
                    v = tuple(float(x) for x in v)
                elif typ == "str":
                    if not isinstance(v, str):
                        raise TypeError
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {k!r}: {v!r}") from exc
            out[k] = v
        return cls(**out)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["xis"] = list(self.xis)
        d["angularT"] = list(self.angularT)
        return d


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, int)) and not isinstance(x, float):
        return str(int(x))
    return repr(float(x))


def write_csv(path: Path, header: list, rows: list) -> None:
    lines = [",".join(header)] + [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


# ----------------------------------------------------------------- commands

def run_crossover(cfg: RunConfig, out: Path) -> list:
    from .ensemble import EnsembleConfig, mc_f2_ratio
    ens = EnsembleConfig(cfg.n, cfg.W, cfg.E, cfg.seed)
    rows = mc_f2_ratio(ens, cfg.xis, cfg.samples, single=cfg.singlePrecision, C=cfg.regimeC)
    body = []
    for r in rows:
        x = 2.0 * math.pi * r.xi
        sine = 1.0 if x == 0 else math.sin(x) / x
        body.append([r.xi, r.ratio, r.std_error, r.samples, r.regime, sine])
    write_csv(out / "crossover.csv", ["xi", "ratio", "std_error", "samples", "regime", "sine_kernel"], body)
    return ["crossover.csv"]


def run_transfer_spectrum(cfg: RunConfig, out: Path) -> list:
    from .saddle import saddle_data
    from .transfer import CartesianEngine, PolarBlockEngine, spectrum
    sd = saddle_data(cfg.E, cfg.W)
    engines = ("polar", "cartesian") if cfg.engine == "both" else (cfg.engine,)
    body, written = [], []
    for name in engines:
        if name == "polar":
            eng = PolarBlockEngine(sd, cfg.perAxisOrder, cfg.jMax, cfg.taylorOrder)
        else:
            eng = CartesianEngine(sd)
        rep = spectrum(eng, cfg.howMany)
        (out / f"spectrum_{name}.json").write_text(rep.to_json() + "\n")
        written.append(f"spectrum_{name}.json")
        for i, (lam, res, j) in enumerate(zip(rep.eigenvalues, rep.residuals, rep.sectors)):
            body.append([name, i, lam.real, lam.imag, abs(lam), res, j])
    write_csv(out / "spectrum.csv", ["engine", "index", "re", "im", "abs", "residual", "sector"], body)
    return written + ["spectrum.csv"]


def run_angular_check(cfg: RunConfig, out: Path) -> list:
    from .angular import angular_eigenvalue, kstar_apply, legendre
    import numpy as np
    body = []
    u = np.linspace(0.0, 1.0, 7)
    th = np.linspace(0.0, 2.0 * math.pi, 7, endpoint=False) + 0.3
    for j in range(min(cfg.jMax, 6) + 1):
        phi = math.sqrt(2 * j + 1) * legendre(j, 1.0 - 2.0 * u**2)
        k = int(np.argmax(np.abs(phi)))
        for T in cfg.angularT:
            exact = angular_eigenvalue(j, T)
            quad = float(np.real(kstar_apply(j, T, u[k:k + 1], th[k:k + 1])[0]) / phi[k])
            body.append([j, T, exact, quad, abs(exact - quad)])
    write_csv(out / "angular_check.csv", ["j", "T", "exact", "quadrature", "abs_diff"], body)
    return ["angular_check.csv"]


def run_susy_check(cfg: RunConfig, out: Path) -> list:
    from .ensemble import EnsembleConfig, covariance_profile, mc_d2
    from .saddle import saddle_data
    from .transfer import SectorEngine, f2_via_transfer
    sd = saddle_data(cfg.E, cfg.W)
    cov = covariance_profile(cfg.n, cfg.W)
    res = f2_via_transfer(sd, 0.0, cfg.n, cov, SectorEngine(sd, h=min(0.35, 0.6 / cfg.W), L=6.5))
    mc = mc_d2(EnsembleConfig(cfg.n, cfg.W, cfg.E, cfg.seed), cfg.samples)
    val = res.value
    z = (val.real - mc.value) / mc.stdError if mc.stdError > 0 else math.inf
    write_csv(out / "susy_check.csv",
              ["n", "W", "E", "f2_transfer_re", "f2_transfer_im", "imag_ratio", "mc_value", "mc_std_error", "samples", "z_score"],
              [[cfg.n, cfg.W, cfg.E, val.real, val.imag, res.imagRatio, mc.value, mc.stdError, mc.samples, z]])
    return ["susy_check.csv"]


def run_density_check(cfg: RunConfig, out: Path) -> list:
    from .ensemble import EnsembleConfig, empirical_density, semicircle_cdf
    hist = empirical_density(EnsembleConfig(cfg.n, cfg.W, cfg.E, cfg.seed), cfg.samples, cfg.bins)
    e = hist.edges
    width = e[1:] - e[:-1]
    ref = (semicircle_cdf(e[1:]) - semicircle_cdf(e[:-1])) / width
    body = [[lo, hi, d, r] for lo, hi, d, r in zip(e[:-1], e[1:], hist.density, ref)]
    write_csv(out / "density.csv", ["bin_left", "bin_right", "density", "semicircle"], body)
    (out / "density_summary.json").write_text(json.dumps({"kolmogorov": hist.kolmogorov_distance(),
                                                          "eigenvalues": int(len(hist.eigenvalues))}) + "\n")
    return ["density.csv", "density_summary.json"]


RUNNERS = {
    "crossover": run_crossover,
    "transfer-spectrum": run_transfer_spectrum,
    "angular-check": run_angular_check,
    "susy-check": run_susy_check,
    "density-check": run_density_check,
}


def library_version() -> str:
    from . import __version__
    return __version__


def run(cfg: RunConfig) -> list:
    """Execute one command, writing artifacts and manifest.json into cfg.output."""
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    written = RUNNERS[cfg.command](cfg, out)
    manifest = {
        "command": cfg.command,
        "config": cfg.to_dict(),
        "version": library_version(),
        "wall_time_s": time.perf_counter() - t0,
        "threads": os.environ.get("BANDXFER_THREADS"),
        "outputs": written,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return written


def _error(out: Path | None, exc: BaseException, command: str | None) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc), "command": command}
    text = json.dumps(payload)
    print(text, file=sys.stderr)
    if out is not None:
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "error.json").write_text(text + "\n")
        except OSError:
            pass


def main(argv: list | None = None) -> int:
    parser = argparse.ArgumentParser(prog="bandxfer")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True)
    parser.add_argument("--output", required=True)
    args = parser.parse_args(argv)
    threads = os.environ.get("BANDXFER_THREADS")
    if threads:
        for var in THREAD_VARS:
            os.environ[var] = threads
    out = Path(args.output)
    try:
        raw = json.loads(Path(args.config).read_text())
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        raw.setdefault("command", args.command)
        if raw["command"] != args.command:
            raise ConfigError(f"config command {raw['command']!r} differs from {args.command!r}")
        raw["output"] = str(out)
        cfg = RunConfig.from_dict(raw)
    except (OSError, ValueError) as exc:
        _error(out, exc, args.command)
        return 2
    try:
        run(cfg)
    except Exception as exc:  # any module failure becomes an error record
        _error(out, exc, args.command)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
