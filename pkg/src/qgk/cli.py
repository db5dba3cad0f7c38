"""Command-line surface: encode, decode, sign, capacity, validate, metrics.

Recovery factors can come from flags, from the QGK_PASSWORD / QGK_SECRET /
QGK_CONTEXT environment variables, or from an interactive prompt, in that
order of precedence; flags win so scripted runs stay explicit.

Exit codes: 0 success; 2 extraction failure (single message "extraction
failed"); 3 capacity exceeded; 4 I/O or format error.  Decode prints no
partial output on failure, and the failure output is byte-identical no
matter which internal stage failed.
"""

from __future__ import annotations

import argparse
import getpass
import hashlib
import io
import json
import math
import os
import sys
from pathlib import Path

from PIL import Image

from . import __version__, analysis, payload as payload_mod, pipeline, plots, quantum, stego
from .context import (
    RecoveryState,
    compute_image_signature,
    derive_master_seed,
    expand_seeds,
)
from .errors import CapacityError, FormatError, ParameterError, StageFailure

__all__ = ["build_parser", "main", "script"]

_ENV_PASSWORD = "QGK_PASSWORD"
_ENV_SECRET = "QGK_SECRET"
_ENV_CONTEXT = "QGK_CONTEXT"

# fixed labels for the validate subcommand's shot-sampling seeds, so repeated
# runs with the same factors reproduce byte-identically
_SHOT_LABEL_CLEAN = b"QGK/shots/clean"
_SHOT_LABEL_NOISY = b"QGK/shots/noisy"

_EXTRACTION_FAILED = "extraction failed"


def _factor_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--password", help=f"password factor (or ${_ENV_PASSWORD})")
    p.add_argument("--secret", help=f"shared secret factor (or ${_ENV_SECRET})")
    p.add_argument("--context", help=f"context string factor (or ${_ENV_CONTEXT})")
    return p


def _config_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--iterations", type=int, default=None, help="PBKDF2 iteration count")
    p.add_argument("--qubits", type=int, default=4, help="circuit width")
    p.add_argument("--depth", type=int, default=3, help="circuit depth")
    p.add_argument(
        "--ablation",
        choices=pipeline.ABLATION_MODES,
        default=None,
        help="developer-only degraded mode; both sides must use the same value",
    )
    return p


def _reference_group(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--reference", help="original cover image (PNG)")
    g.add_argument("--signature", help="cover signature as 64 hex chars")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgk",
        description="Context-bound LSB steganography with a circuit-derived gate key.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    factors = _factor_parent()
    config = _config_parent()

    p = sub.add_parser("encode", parents=[factors, config], help="embed a secret into a cover PNG")
    p.add_argument("--cover", required=True, help="cover image (PNG)")
    p.add_argument("--out", required=True, help="output stego PNG path")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--message", help="UTF-8 text secret")
    src.add_argument("--message-file", help="file whose bytes are the secret")
    src.add_argument("--secret-image", help="PNG/JPEG image secret")
    p.add_argument("--resize", type=int, default=payload_mod.DEFAULT_RESIZE,
                   help="canonical square size for image secrets")
    p.add_argument("--json", action="store_true", help="emit a JSON record instead of plain text")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", parents=[factors, config], help="recover a secret from a stego PNG")
    p.add_argument("--stego", required=True, help="stego image (PNG)")
    _reference_group(p)
    p.add_argument("--out", help="write the payload here instead of stdout")
    p.add_argument("--debug-stages", action="store_true",
                   help="developer-only: name the failing stage instead of the opaque failure")
    p.add_argument("--json", action="store_true",
                   help="emit a JSON status record (requires --out)")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("sign", help="print the 32-byte signature of an image")
    p.add_argument("--image", required=True, help="PNG image to sign")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sign)

    p = sub.add_parser("capacity", help="print the payload byte budget of a cover size")
    dims = p.add_argument_group("dimensions")
    dims.add_argument("--image", help="read dimensions from this PNG")
    dims.add_argument("--width", type=int, help="cover width in pixels")
    dims.add_argument("--height", type=int, help="cover height in pixels")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser(
        "validate",
        parents=[factors, config],
        help="compare exact, sampled, and noise-proxied circuit distributions",
    )
    _reference_group(p)
    p.add_argument("--shots", type=int, default=2048, help="shots per sampling regime")
    p.add_argument("--rho-dep", type=float, default=0.03, help="depolarizing rate of the proxy")
    p.add_argument("--rho-ro", type=float, default=0.01, help="per-bit readout flip rate")
    p.add_argument("--log-base", choices=["e", "2"], default="e",
                   help="log base for the cross-entropy row")
    p.add_argument("--json", action="store_true")
    p.add_argument("--figures", help="directory for rendered figures")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("metrics", help="image quality of one PNG against another")
    p.add_argument("image_a", help="reference image (PNG)")
    p.add_argument("image_b", help="image to evaluate (PNG)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--figures", help="directory for rendered figures")
    p.set_defaults(func=cmd_metrics)

    return parser


def _resolve_factor(value, env_name: str, label: str):
    if value is not None:
        return value
    env = os.environ.get(env_name)
    if env:
        return env
    if sys.stdin.isatty():
        typed = getpass.getpass(f"{label}: ")
        if typed:
            return typed
    raise ParameterError(f"missing {label}; pass the flag or set ${env_name}")


def _factors(args):
    return (
        _resolve_factor(args.password, _ENV_PASSWORD, "password"),
        _resolve_factor(args.secret, _ENV_SECRET, "shared secret"),
        _resolve_factor(args.context, _ENV_CONTEXT, "context string"),
    )


def _config(args, debug: bool = False) -> pipeline.PipelineConfig:
    kwargs = dict(qubits=args.qubits, depth=args.depth, ablation=args.ablation, debug=debug)
    if args.iterations is not None:
        kwargs["iterations"] = args.iterations
    if getattr(args, "resize", None) is not None:
        kwargs["resize_target"] = args.resize
    return pipeline.PipelineConfig(**kwargs)


def _json_value(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _emit_record(record: dict) -> None:
    print(json.dumps({k: _json_value(v) for k, v in record.items()}))


def _emit_table(rows) -> None:
    width = max(len(name) for name, _ in rows) + 2
    for name, value in rows:
        if isinstance(value, float):
            value = "inf" if math.isinf(value) else f"{value:.6f}"
        print(f"{name:<{width}}{value}")


def _figures_dir(args):
    if not args.figures:
        return None
    path = Path(args.figures)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_encode(args) -> int:
    cover = stego.load_png(args.cover)
    if args.message is not None:
        secret = payload_mod.SecretInput(kind="text", data=args.message)
    elif args.message_file is not None:
        secret = payload_mod.SecretInput(kind="bytes", data=Path(args.message_file).read_bytes())
    else:
        raster = payload_mod.load_secret_image(args.secret_image)
        secret = payload_mod.SecretInput(kind="image", data=raster, resize_target=args.resize)
    password, shared, context = _factors(args)
    stego_raster, signature_hex = pipeline.encode(
        cover, secret, password, shared, context, _config(args)
    )
    stego.save_png(args.out, stego_raster)
    if args.json:
        _emit_record({"stego": args.out, "signature": signature_hex})
    else:
        print(signature_hex)
    return 0


def cmd_decode(args) -> int:
    if args.json and not args.out:
        raise ParameterError("--json decode requires --out so stdout stays clean")
    raster = stego.load_png(args.stego)
    reference = stego.load_png(args.reference) if args.reference else args.signature
    password, shared, context = _factors(args)
    result = pipeline.decode(
        raster, password, shared, context, reference, _config(args, debug=args.debug_stages)
    )
    if result is None:
        print(_EXTRACTION_FAILED, file=sys.stderr)
        return 2
    if result.is_image:
        if args.out:
            stego.save_png(args.out, result.data)
        else:
            buf = io.BytesIO()
            Image.fromarray(result.data, mode="RGB").save(buf, format="PNG")
            sys.stdout.buffer.write(buf.getvalue())
    else:
        if args.out:
            Path(args.out).write_bytes(result.data)
        else:
            sys.stdout.buffer.write(result.data)
            sys.stdout.buffer.flush()
    if args.json:
        _emit_record({"recovered": True, "payload_type": int(result.payload_type), "out": args.out})
    return 0


def cmd_sign(args) -> int:
    signature = compute_image_signature(stego.load_png(args.image)).hex()
    if args.json:
        _emit_record({"image": args.image, "signature": signature})
    else:
        print(signature)
    return 0


def cmd_capacity(args) -> int:
    if args.image is not None:
        raster = stego.load_png(args.image)
        height, width = raster.shape[:2]
    elif args.width is not None and args.height is not None:
        width, height = args.width, args.height
    else:
        raise ParameterError("pass --image or both --width and --height")
    budget = stego.capacity(width, height)
    if args.json:
        _emit_record({"width": width, "height": height, "capacity_bytes": budget})
    else:
        print(budget)
    return 0


def cmd_validate(args) -> int:
    password, shared, context = _factors(args)
    if args.reference:
        signature = compute_image_signature(stego.load_png(args.reference))
    else:
        from .context import signature_from_hex

        signature = signature_from_hex(args.signature)
    state = RecoveryState(
        password=password.encode("utf-8"),
        shared_secret=shared.encode("utf-8"),
        context_string=context.encode("utf-8"),
        image_signature=signature,
    )
    seeds = expand_seeds(derive_master_seed(state))
    spec = quantum.derive_parameters(seeds.quantum_seed, args.qubits, args.depth)
    ideal = quantum.evaluate_statevector(spec)
    sim = quantum.sample_shots(
        ideal, args.shots, hashlib.sha256(seeds.quantum_seed + _SHOT_LABEL_CLEAN).digest()
    )
    hw = quantum.sample_shots(
        ideal,
        args.shots,
        hashlib.sha256(seeds.quantum_seed + _SHOT_LABEL_NOISY).digest(),
        noise=quantum.NoiseParams(rho_dep=args.rho_dep, rho_ro=args.rho_ro),
    )
    base = None if args.log_base == "e" else 2.0
    report = analysis.distribution_report(sim, hw, ideal, base=base)
    record = {
        "qubits": args.qubits,
        "depth": args.depth,
        "shots": args.shots,
        "peak_exact": ideal.modal_bitstring(),
        "peak_sim": report.peak_sim,
        "peak_hw": report.peak_hw,
        "peaks_agree": report.peaks_agree,
        "shannon_entropy_sim": report.entropy_sim,
        "shannon_entropy_hw": report.entropy_hw,
        "cross_entropy": report.cross_entropy,
        "linear_xeb_sim": report.linear_xeb_sim,
        "linear_xeb_hw": report.linear_xeb_hw,
        "tvd": report.tvd,
        "tvd_sim_exact": analysis.total_variation_distance(sim, ideal),
        "tvd_hw_exact": analysis.total_variation_distance(hw, ideal),
    }
    if args.json:
        _emit_record(record)
    else:
        _emit_table(list(record.items()))
    figures = _figures_dir(args)
    if figures:
        out = plots.save_distribution_figure(figures / "distributions.png", ideal, sim, hw)
        print(f"figure written: {out}", file=sys.stderr)
    return 0


def cmd_metrics(args) -> int:
    image_a = stego.load_png(args.image_a)
    image_b = stego.load_png(args.image_b)
    report = analysis.image_quality(image_a, image_b)
    record = {
        "ssim": report.ssim,
        "psnr": report.psnr,
        "rmse": report.rmse,
        "mae": report.mae,
    }
    if args.json:
        _emit_record(record)
    else:
        _emit_table(list(record.items()))
    figures = _figures_dir(args)
    if figures:
        out = plots.save_difference_figure(figures / "difference.png", image_a, image_b)
        print(f"figure written: {out}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageFailure as exc:
        print(f"extraction failed at stage: {exc.stage}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (FormatError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


def script() -> None:
    raise SystemExit(main())
