"""Command line entry points.

Subcommands: synth, train-dldm, sample, train-pfp, eval, stream, replay,
calibrate-check. Every subcommand takes --config (JSON file merged over
defaults) and --seed. Log level comes from FLEXPOSE_LOG_LEVEL.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

logger = logging.getLogger("flexpose")


def load_config(path):
    if path is None:
        return {}
    with open(path) as f:
        return json.load(f)


def _setup_logging():
    level = os.environ.get("FLEXPOSE_LOG_LEVEL", "INFO").upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s")


# -- subcommands -------------------------------------------------------------

def cmd_synth(args):
    from .datasets import SynthConfig, build_dataset, save_dataset
    from .synth import ClothSurrogateParams

    cfg_d = load_config(args.config)
    sur = ClothSurrogateParams(**cfg_d.pop("surrogate", {}))
    cfg = SynthConfig(surrogate=sur, **cfg_d)
    if args.seed is not None:
        cfg.seed = args.seed
    data = build_dataset(cfg)
    save_dataset(args.out, data)
    frames = sum(len(s) for s in data["imu_tight"])
    nwin = 0 if data["windows"] is None else len(data["windows"])
    print(f"wrote {cfg.sequences} sequences ({frames} frames at {cfg.fps} fps), "
          f"{nwin} displacement windows -> {args.out}")


def cmd_train_dldm(args):
    from .augment import DenoiserConfig, NoiseSchedule, VAEConfig
    from .datasets import load_dataset
    from .pipeline import save_dldm, train_displacement_generator

    cfg_d = load_config(args.config)
    seed = args.seed if args.seed is not None else 0
    data = load_dataset(args.data)
    if data["windows"] is None or not len(data["windows"]):
        sys.exit("dataset has no displacement windows (synthesize with loose enabled)")
    vcfg = VAEConfig(**cfg_d.get("vae", {}))
    dcfg = DenoiserConfig(**cfg_d.get("denoiser", {}))
    sch_d = cfg_d.get("schedule", {})
    schedule = NoiseSchedule.linear(**sch_d)
    vae, den, std, (vh, dh) = train_displacement_generator(
        data["windows"], vcfg, dcfg, schedule, seed)
    save_dldm(args.out, vae, den, std, schedule, seed=seed,
              step=vcfg.steps + dcfg.steps)
    print(f"vae loss {vh[0][0]:.3f} -> {vh[-1][0]:.3f}; "
          f"denoiser loss {dh[0]:.3f} -> {float(np.mean(dh[-25:])):.3f}")
    print(f"wrote {args.out}")


def cmd_sample(args):
    from .augment import export_latents, sample_windows, vae_sample_windows
    from .pipeline import load_dldm
    from .synth import save_manifest

    seed = args.seed if args.seed is not None else 0
    vae, den, std, schedule = load_dldm(args.model)
    if args.skip_diffusion:
        windows = vae_sample_windows(args.n, vae, std, seed)
    else:
        windows = sample_windows(args.n, schedule, den, vae, std, seed)
    os.makedirs(args.out, exist_ok=True)
    np.save(os.path.join(args.out, "windows.npy"), windows)
    save_manifest(os.path.join(args.out, "manifest.json"), {
        "kind": "generated-displacement-windows",
        "count": int(args.n),
        "window": vae.cfg.window,
        "channel_layout": "4 IMUs x (rot6d[6], acc[3])",
        "seed": seed,
        "diffusion": not args.skip_diffusion,
    })
    if args.latents_csv:
        export_latents(windows, vae, std, args.latents_csv)
    print(f"wrote {args.n} windows -> {args.out}")


def cmd_train_pfp(args):
    from .datasets import load_dataset
    from .fusion import FusionConfig
    from .pipeline import load_dldm, save_pfp, train_fusion
    from .augment import sample_windows

    cfg_d = load_config(args.config)
    seed = args.seed if args.seed is not None else 0
    aug_d = cfg_d.pop("augment", {})
    if "loss_weights" in cfg_d:
        cfg_d["loss_weights"] = tuple(cfg_d["loss_weights"])
    cfg = FusionConfig(**cfg_d)
    data = load_dataset(args.data)
    windows = None
    if args.dldm:
        vae, den, std, schedule = load_dldm(args.dldm)
        n = aug_d.get("windows", 500)
        windows = sample_windows(n, schedule, den, vae, std, aug_d.get("seed", seed + 1))
        logger.info("augmenting with %d generated windows", n)
    model, history = train_fusion(data, cfg, seed, augment_windows=windows)
    save_pfp(args.out, model, seed=seed, step=cfg.steps)
    print(f"loss {history[0]['total']:.4f} -> {history[-1]['total']:.4f} "
          f"over {cfg.steps} steps; wrote {args.out}")
    if args.curve:
        with open(args.curve, "w") as f:
            f.write("step,total,position,rotation,elbow\n")
            for i, h in enumerate(history):
                f.write(f"{i},{h['total']},{h['position']},{h['rotation']},{h['elbow']}\n")


def cmd_eval(args):
    from .datasets import load_dataset
    from .pipeline import evaluate_model, load_pfp

    data = load_dataset(args.data)
    model = load_pfp(args.model)
    key = "imu_loose" if args.imu == "loose" else "imu_tight"
    if not data[key]:
        sys.exit(f"dataset has no {key} sequences")
    report = evaluate_model(model, data, key)
    print(report.to_text())
    if args.report:
        report.to_csv(args.report)
        print(f"wrote {args.report}")


def _make_session(args, cfg_d):
    from .kinematics import upper_body
    from .pipeline import load_pfp
    from .runtime import PoseSession, SessionConfig

    model = load_pfp(args.model)
    scfg = SessionConfig(**cfg_d.get("session", {}))
    if getattr(args, "allow_imu_only", False):
        scfg.allow_imu_only = True
    session = PoseSession(model, upper_body(), scfg)
    session.begin_calibration()
    return session


def _record_sink(args):
    text = open(args.out, "w") if args.out else sys.stdout
    binary = open(args.binary_out, "wb") if args.binary_out else None

    def sink(record):
        text.write(record.to_line() + "\n")
        if binary is not None:
            vals = np.concatenate([record.theta.ravel(), record.positions.ravel()])
            binary.write(np.uint64(record.frame_id).tobytes())
            binary.write(vals.astype("<f8").tobytes())

    def close():
        if args.out:
            text.close()
        if binary is not None:
            binary.close()
    return sink, close


def cmd_replay(args):
    from .runtime import run_replay, read_replay

    cfg_d = load_config(args.config)
    session = _make_session(args, cfg_d)
    sink, close = _record_sink(args)
    frames = read_replay(args.input)
    records, stats = run_replay(session, frames, sink)
    close()
    if args.session_out:
        session.save_session(args.session_out)
    s = stats.summary(stats.wall_seconds)
    print(f"frames {s['frames_in']}, poses {s['records_out']}, skipped {s['skipped']}, "
          f"fps {s.get('fps', 0):.0f}, latency p50 {s['latency_p50_ms']:.2f} ms "
          f"p99 {s['latency_p99_ms']:.2f} ms")


def cmd_stream(args):
    from .runtime import serve_once

    cfg_d = load_config(args.config)
    session = _make_session(args, cfg_d)
    sink, close = _record_sink(args)
    stats = serve_once(args.host, args.port, session, sink,
                       fps=cfg_d.get("session", {}).get("fps", 60))
    close()
    s = stats.summary(stats.wall_seconds)
    print(f"frames {s['frames_in']}, poses {s['records_out']}, dropped {s['dropped']}, "
          f"latency p99 {s['latency_p99_ms']:.2f} ms")


def cmd_calibrate_check(args):
    from .runtime import read_replay, run_replay

    cfg_d = load_config(args.config)
    session = _make_session(args, cfg_d)
    frames = read_replay(args.input)
    try:
        run_replay(session, frames)
    except Exception as exc:
        print(f"calibration FAILED ({session.phase.value}): {exc}")
        sys.exit(1)
    ok_t = session.references is not None
    ok_e = session.flex_ranges is not None
    print(f"t-pose references: {'ok' if ok_t else 'missing'}")
    if ok_e:
        for side, rng in zip("LR", session.flex_ranges):
            print(f"flex {side}: raw [{rng.raw_min:.4f}, {rng.raw_max:.4f}] "
                  f"-> [{rng.target_min:g}, {rng.target_max:g}] deg")
    else:
        print("flex ranges: missing")
    print(f"phase: {session.phase.value}")
    if not (ok_t and (ok_e or session.cfg.allow_imu_only)):
        sys.exit(1)


def main(argv=None):
    _setup_logging()
    p = argparse.ArgumentParser(prog="flexpose",
                                description="garment IMU + flex sensor motion capture pipeline")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int, default=None)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("synth", cmd_synth, "generate a synthetic sensor dataset")
    sp.add_argument("--out", required=True)

    sp = add("train-dldm", cmd_train_dldm, "train the displacement generator")
    sp.add_argument("--data", required=True)
    sp.add_argument("--out", required=True)

    sp = add("sample", cmd_sample, "sample displacement windows from a trained generator")
    sp.add_argument("--model", required=True)
    sp.add_argument("--n", type=int, default=500)
    sp.add_argument("--out", required=True)
    sp.add_argument("--latents-csv", help="also export posterior means of the samples")
    sp.add_argument("--skip-diffusion", action="store_true",
                    help="decode prior draws directly (no-diffusion ablation)")

    sp = add("train-pfp", cmd_train_pfp, "train the pose fusion predictor")
    sp.add_argument("--data", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--dldm", help="displacement generator checkpoint for augmentation")
    sp.add_argument("--curve", help="write the training curve CSV here")

    sp = add("eval", cmd_eval, "evaluate a predictor on a dataset")
    sp.add_argument("--data", required=True)
    sp.add_argument("--model", required=True)
    sp.add_argument("--imu", choices=["tight", "loose"], default="loose")
    sp.add_argument("--report", help="CSV report path")

    sp = add("stream", cmd_stream, "serve one wire-format TCP session")
    sp.add_argument("--model", required=True)
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=9469)
    sp.add_argument("--out", help="pose stream text file (default stdout)")
    sp.add_argument("--binary-out", help="binary mirror of the pose stream")
    sp.add_argument("--allow-imu-only", action="store_true")

    sp = add("replay", cmd_replay, "run a recorded wire file through the session")
    sp.add_argument("--model", required=True)
    sp.add_argument("--input", required=True)
    sp.add_argument("--out", help="pose stream text file (default stdout)")
    sp.add_argument("--binary-out", help="binary mirror of the pose stream")
    sp.add_argument("--session-out", help="write the calibration session record")
    sp.add_argument("--allow-imu-only", action="store_true")

    sp = add("calibrate-check", cmd_calibrate_check, "validate the calibration phases of a recording")
    sp.add_argument("--model", required=True)
    sp.add_argument("--input", required=True)
    sp.add_argument("--allow-imu-only", action="store_true")

    args = p.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    main()
