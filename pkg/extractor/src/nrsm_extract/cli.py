import sys

import click

from .extract import ExtractionSpec, extract


@click.command(help="Export layer activations over an image folder as NRSM matrices.")
@click.option("--model", "model_id", required=True,
              help="Model id: 'toy' or 'tv:<torchvision-name>'.")
@click.option("--layers", required=True, help="Comma-separated module names to capture.")
@click.option("--images", "image_dir", required=True, type=click.Path(), help="Image folder.")
@click.option("--out", "out_prefix", required=True,
              help="Output prefix; one <prefix>_<layer>.nrsm + .json per layer.")
@click.option("--resize", type=int, default=224, show_default=True,
              help="Square resize target in pixels.")
@click.option("--weights", default=None, type=click.Path(),
              help="Local state-dict file (otherwise published weights for tv: models).")
@click.option("--batch-size", type=int, default=8, show_default=True)
def main(model_id, layers, image_dir, out_prefix, resize, weights, batch_size):
    spec = ExtractionSpec(
        model=model_id,
        layers=tuple(tok.strip() for tok in layers.split(",") if tok.strip()),
        image_dir=image_dir,
        out_prefix=out_prefix,
        resize=(resize, resize),
        weights=weights,
        batch_size=batch_size,
    )
    try:
        paths = extract(spec)
    except (ValueError, FileNotFoundError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    for layer, path in paths.items():
        click.echo(f"{layer}: {path}")


if __name__ == "__main__":
    main()
