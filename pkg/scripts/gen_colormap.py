"""Regenerate the packaged colormap LUT asset.

The palette is matplotlib's "magma" sampled at 256 levels and frozen as
8-bit RGB CSV. Run only when intentionally changing the palette; the CSV
in src/skillpipe/data/ is the source of truth for rendered output.
"""

import pathlib

import numpy as np
from matplotlib import colormaps

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "skillpipe" / "data" / "colormap.csv"


def main() -> None:
    cmap = colormaps["magma"]
    rgba = cmap(np.linspace(0.0, 1.0, 256))
    rgb = np.floor(rgba[:, :3] * 255.0 + 0.5).astype(np.uint8)
    lines = [f"{r},{g},{b}" for r, g, b in rgb]
    OUT.write_text("\n".join(lines) + "\n")
    print(f"wrote {OUT} ({len(lines)} entries)")


if __name__ == "__main__":
    main()
