"""``sincftn`` command-line experiment runner.

Subcommands ``generate``, ``ber-sweep``, ``rate-capacity`` and ``dmin`` each
write headered CSV results plus a ``manifest.json`` holding the exact
parameter set into ``--output``. Exit status: 0 on success, 2 for
configuration errors, 3 for runtime failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .. import __version__
from ..analysis import (
    CapacityInput,
    RateInput,
    capacity_from_M,
    distinguishable_signals,
    estimate_isi_power,
    min_distance,
    n_channels,
    notdm_capacity,
    rate_gain,
    shannon_capacity,
    symbol_rate,
)
from ..analysis.ber import BerPoint, simulate_point, wilson_interval
from ..analysis.distance import INTEGRATION_SPAN
from ..channel import point_seed
from ..framing import make_mux, otdm_mux
from ..signal_core import TimeGrid, sample_sequence
from .config import PRESETS, ConfigError, ExperimentConfig, load_config

log = logging.getLogger("sincftn")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

MODE_STREAMS = {"otdm": 0, "notdm": 1}
BER_HEADER = ("mode", "ebn0_db", "ber", "n_errors", "n_bits", "ci_low", "ci_high")


def _fmt(x: float) -> str:
    return format(float(x), ".10g")


def _sci(x: float) -> str:
    return format(float(x), ".6e")


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue())


def _write_manifest(out: Path, command: str, cfg: ExperimentConfig, preset, files, extra=None) -> None:
    manifest = {
        "command": command,
        "version": __version__,
        "preset": preset,
        "config": cfg.canonical(),
        "config_sha256": cfg.digest(),
        "files": sorted(files),
    }
    if extra:
        manifest.update(extra)
    (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def cmd_generate(cfg: ExperimentConfig, out: Path, preset=None, threads: int = 1) -> list[str]:
    """Sampled sequence (and its line spectrum) centred on ``t = 0``."""
    spec = cfg.sequence_spec()
    s = cfg.run.samples_per_period
    n = cfg.run.n_periods * s
    half = n // 2
    dt = spec.period / s
    grid = TimeGrid(-half * dt, dt, n)
    wave = sample_sequence(spec, grid)
    times = (np.arange(n) - half) * dt
    _write_csv(out / "waveform.csv", ("time_s", "amplitude"),
               ((_sci(t), _sci(v)) for t, v in zip(times, wave.samples)))
    files = ["waveform.csv"]
    if cfg.run.spectrum:
        # shift so the transform sees the window starting at t = 0
        spectrum = np.fft.fftshift(np.fft.fft(np.roll(wave.samples, -half))) / n
        freqs = np.fft.fftshift(np.fft.fftfreq(n, dt))
        amp = np.abs(spectrum)
        amp[amp < 1e-12] = 0.0
        _write_csv(out / "spectrum.csv", ("freq_hz", "amplitude"),
                   ((_sci(f), _sci(a)) for f, a in zip(freqs, amp)))
        files.append("spectrum.csv")
    _write_manifest(out, "generate", cfg, preset, files)
    return files


def _mode_mux(cfg: ExperimentConfig, mode: str):
    spec = cfg.sequence_spec()
    return otdm_mux(spec) if mode == "otdm" else cfg.notdm_mux()


def _checkpoint_path(ckpt_dir: Path, cfg: ExperimentConfig, mode: str, k: int) -> Path:
    return ckpt_dir / f"{cfg.digest()[:16]}_{mode}_{k:03d}.json"


def _load_checkpoint(path: Path, ebn0_db: float) -> BerPoint | None:
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError):
        return None
    if data.get("ebn0_db") != ebn0_db:
        return None
    n_errors, n_bits = int(data["n_errors"]), int(data["n_bits"])
    lo, hi = wilson_interval(n_errors, n_bits)
    return BerPoint(ebn0_db, n_errors / n_bits, n_errors, n_bits, lo, hi)


def cmd_ber_sweep(cfg: ExperimentConfig, out: Path, preset=None, threads: int = 1) -> list[str]:
    """Monte Carlo BER for each configured mode, resumable per point."""
    ebn0 = list(cfg.channel.ebn0_db)
    if not ebn0:
        raise ConfigError("channel.ebn0_db is empty")
    spec = cfg.sequence_spec()
    rx_cfg = cfg.receiver_config()
    run = cfg.run
    ckpt_dir = out / ".checkpoints"
    ckpt_dir.mkdir(exist_ok=True)

    jobs = []
    results: dict[tuple[str, int], BerPoint] = {}
    for mode in run.modes:
        for k, e in enumerate(ebn0):
            path = _checkpoint_path(ckpt_dir, cfg, mode, k)
            done = _load_checkpoint(path, e) if path.exists() else None
            if done is not None:
                results[(mode, k)] = done
            else:
                jobs.append((mode, k, path))
    if results:
        log.info("resuming: %d of %d points already complete", len(results), len(results) + len(jobs))

    def run_job(job):
        mode, k, path = job
        point = simulate_point(
            spec, _mode_mux(cfg, mode), rx_cfg, ebn0[k], run.n_symbols,
            point_seed(cfg.channel.master_seed, MODE_STREAMS[mode], k),
            run.symbols_per_frame, run.samples_per_period,
        )
        path.write_text(json.dumps({"ebn0_db": ebn0[k], "n_errors": point.n_errors,
                                    "n_bits": point.n_bits}))
        log.info("%s Eb/N0=%g dB: BER=%.3e (%d/%d)", mode, point.ebn0_db, point.ber,
                 point.n_errors, point.n_bits)
        return (mode, k), point

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for key, point in pool.map(run_job, jobs):
            results[key] = point

    rows = []
    for mode in run.modes:
        for k in sorted(range(len(ebn0)), key=lambda i: ebn0[i]):
            p = results[(mode, k)]
            rows.append((mode, _fmt(p.ebn0_db), _sci(p.ber), p.n_errors, p.n_bits,
                         _sci(p.ci_low), _sci(p.ci_high)))
    _write_csv(out / "ber_curve.csv", BER_HEADER, rows)
    _write_manifest(out, "ber-sweep", cfg, preset, ["ber_curve.csv"])
    for r in rows:
        print(",".join(map(str, r)))
    return ["ber_curve.csv"]


def read_ber_csv(path: Path) -> dict[str, list[BerPoint]]:
    """Parse a ``ber_curve.csv`` back into points grouped by mode."""
    curves: dict[str, list[BerPoint]] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            curves.setdefault(row["mode"], []).append(BerPoint(
                float(row["ebn0_db"]), float(row["ber"]), int(row["n_errors"]),
                int(row["n_bits"]), float(row["ci_low"]), float(row["ci_high"])))
    return curves


def rate_capacity_rows(cfg: ExperimentConfig, p_isi: float | None) -> list[tuple]:
    spec = cfg.sequence_spec()
    n, df, k = spec.n_lines, spec.line_spacing, cfg.run.bits_per_symbol
    pw = cfg.power
    otdm = symbol_rate(RateInput(n, df, "otdm", k))
    notdm = symbol_rate(RateInput(n, df, "notdm", k))
    gain = rate_gain(n)
    m = distinguishable_signals(pw.p_s, pw.p_n, n)
    rows = [
        ("symbol_rate_otdm", _fmt(otdm.symbol_rate), "Bd", f"{n} channels"),
        ("symbol_rate_notdm", _fmt(notdm.symbol_rate), "Bd", f"{n_channels(n)} channels"),
        ("symbol_rate_gain", _fmt(float(gain)), "ratio",
         f"{float(gain) * 100:.4g}% ({gain.numerator}/{gain.denominator})"),
        ("data_rate_otdm", _fmt(otdm.data_rate), "bit/s", f"K={k}"),
        ("data_rate_notdm", _fmt(notdm.data_rate), "bit/s", f"K={k}"),
        ("shannon_capacity", _fmt(shannon_capacity(pw.p_s, pw.p_n, n, df)), "bit/s", "N channels, AWGN"),
        ("distinguishable_signals", _sci(m), "count", f"exponent {n_channels(n)}"),
        ("geometric_capacity", _fmt(capacity_from_M(m, df)), "bit/s", "df*log2(M)"),
    ]
    if p_isi is None:
        rows.append(("notdm_capacity", "", "bit/s", "requires ISI estimate"))
    else:
        c = notdm_capacity(CapacityInput(pw.p_s, pw.p_n, p_isi, n, df))
        rows.append(("p_isi", _sci(p_isi), "linear", "ISI power"))
        rows.append(("notdm_capacity", _fmt(c), "bit/s", "ISI counted as noise"))
    return rows


def cmd_rate_capacity(cfg: ExperimentConfig, out: Path, preset=None, threads: int = 1) -> list[str]:
    """Rates and capacity limits; NOTDM capacity needs an ISI power."""
    if cfg.power is None:
        raise ConfigError("rate-capacity needs a 'power' section with p_s and p_n")
    p_isi = cfg.power.p_isi
    extra = {}
    if p_isi is None and cfg.power.estimate_isi:
        est = estimate_isi_power(cfg.sequence_spec(), cfg.notdm_mux(), cfg.receiver_config(),
                                 cfg.run.isi_symbols, cfg.channel.master_seed,
                                 cfg.run.symbols_per_frame, cfg.run.samples_per_period)
        # normalised ISI is relative to unit symbol power
        p_isi = est.power * cfg.power.p_s
        extra["isi_estimate"] = {"normalised_power": est.power, "stderr": est.stderr,
                                 "n_samples": est.n_samples}
    rows = rate_capacity_rows(cfg, p_isi)
    _write_csv(out / "rate_capacity.csv", ("quantity", "value", "unit", "note"), rows)
    _write_manifest(out, "rate-capacity", cfg, preset, ["rate_capacity.csv"], extra)
    for r in rows:
        print(f"{r[0]:>24}  {r[1]:>16} {r[2]:<6} {r[3]}")
    return ["rate_capacity.csv"]


def cmd_dmin(cfg: ExperimentConfig, out: Path, preset=None, threads: int = 1) -> list[str]:
    """Exhaustive d_min over the configured tau grid."""
    spec = cfg.sequence_spec()
    rows = []
    for tau in cfg.run.dmin_taus:
        res = min_distance(spec, make_mux(spec, tau), cfg.run.dmin_length, cfg.run.samples_per_period)
        rows.append((_fmt(tau), res.n_branches, _sci(res.dmin_squared),
                     " ".join(str(v) for v in res.argmin)))
    _write_csv(out / "dmin.csv", ("tau", "n_branches", "dmin_squared", "argmin"), rows)
    _write_manifest(out, "dmin", cfg, preset, ["dmin.csv"], {"integration_span": INTEGRATION_SPAN})
    for r in rows:
        print(",".join(map(str, r)))
    return ["dmin.csv"]


COMMANDS = {
    "generate": cmd_generate,
    "ber-sweep": cmd_ber_sweep,
    "rate-capacity": cmd_rate_capacity,
    "dmin": cmd_dmin,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sincftn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or "").strip().splitlines()[0])
        p.add_argument("--config", type=Path, help="JSON experiment configuration")
        p.add_argument("--output", type=Path, default=Path("results"), help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
        p.add_argument("--preset", choices=sorted(PRESETS), help="named parameter preset")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, args.preset)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        args.output.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](cfg, args.output, args.preset, args.threads)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
