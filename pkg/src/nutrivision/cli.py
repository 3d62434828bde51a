"""Operator command line.

    nutrivision analyze --image plate.png --detections boxes.json
    nutrivision recommend --user u1 --count 5
    nutrivision bmi --height-m 1.75 --weight-kg 70
    nutrivision catalog validate my-catalog.csv
    nutrivision serve --port 8000

Exit codes: 0 success, 1 input or schema error, 2 calibration failure
(no usable reference coin). Config comes from --config, else the
NUTRIVISION_CONFIG environment variable, else built-in defaults.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import canonical
from .calibration import RgbImage
from .catalog import load_catalog
from .config import load_config
from .engine import Engine
from .errors import (
    AmbiguousReference,
    NoReferenceFound,
    NutriVisionError,
)
from .profiles import compute_bmi

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_CALIBRATION_ERROR = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nutrivision",
        description="Plate-photo nutrition quantification and recipe recommendations",
    )
    parser.add_argument("--config", help="path to the JSON config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="quantify a plate photo with detector output")
    p.add_argument("--image", required=True, help="PNG or JPEG plate photo")
    p.add_argument("--detections", required=True, help="detection JSON document")
    p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("recommend", help="print ranked recipes for a user")
    p.add_argument("--user", required=True)
    p.add_argument("--count", type=int, default=5)

    p = sub.add_parser("bmi", help="compute BMI and its category")
    p.add_argument("--height-m", type=float, required=True)
    p.add_argument("--weight-kg", type=float, required=True)

    p = sub.add_parser("catalog", help="catalog utilities")
    catalog_sub = p.add_subparsers(dest="catalog_command", required=True)
    v = catalog_sub.add_parser("validate", help="validate a catalog file")
    v.add_argument("path")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, help="overrides the config port")
    p.add_argument("--host", help="overrides the config host")

    return parser


def _cmd_analyze(args, config) -> int:
    engine = Engine(config)
    image = RgbImage.open(args.image)
    report = engine.analyze(image, Path(args.detections).read_bytes())
    payload = canonical.dumps(report.to_dict()) + "\n"
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)
    return EXIT_OK


def _cmd_recommend(args, config) -> int:
    engine = Engine(config)
    rows = engine.recommendations_payload(args.user, count=args.count)
    if not rows:
        print("no recommendations")
        return EXIT_OK
    header = f"{'rank':<5}{'recipe':<28}{'score':<9}{'warnings':<26}video"
    print(header)
    print("-" * len(header))
    for rank, row in enumerate(rows, start=1):
        warnings = (
            "; ".join(
                f"{w['nutrient']} {w['amount_g']:g}g > {w['limit_g']:g}g"
                for w in row["warnings"]
            )
            or "-"
        )
        print(
            f"{rank:<5}{row['recipe']['name']:<28}{row['score']:<9.4f}"
            f"{warnings:<26}{row['recipe']['video_url']}"
        )
    return EXIT_OK


def _cmd_bmi(args) -> int:
    result = compute_bmi(args.height_m, args.weight_kg)
    print(f"{result.value:.3f} {result.category}")
    return EXIT_OK


def _cmd_catalog_validate(args) -> int:
    try:
        catalog = load_catalog(Path(args.path).read_bytes())
    except NutriVisionError as exc:
        print(f"invalid catalog: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    print(f"ok: {len(catalog)} food classes")
    return EXIT_OK


def _cmd_serve(args, config) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(Engine(config))
    uvicorn.run(
        app,
        host=args.host or config.service.host,
        port=args.port if args.port is not None else config.service.port,
    )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; 2 is reserved for calibration
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT_ERROR
    try:
        if args.command == "bmi":
            return _cmd_bmi(args)
        if args.command == "catalog":
            return _cmd_catalog_validate(args)
        config = load_config(args.config)
        if args.command == "analyze":
            return _cmd_analyze(args, config)
        if args.command == "recommend":
            return _cmd_recommend(args, config)
        if args.command == "serve":
            return _cmd_serve(args, config)
        raise AssertionError(f"unhandled command {args.command}")
    except (NoReferenceFound, AmbiguousReference) as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION_ERROR
    except NutriVisionError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except FileNotFoundError as exc:
        print(f"file not found: {exc.filename}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
