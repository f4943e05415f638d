"""Regenerate the knot and isotopy files in data/ from the model library."""

import pathlib

from reidemeister import models
from reidemeister.curve import IsotopyFamily, format_family, format_loop

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"

LOOPS = {
    "circle": (models.circle(), "round unit circle"),
    "trefoil": (models.trefoil(), "x = sin u + 2 sin 2u, y = cos u - 2 cos 2u, z = -sin 3u"),
    "trefoil_mirror": (models.trefoil().mirrored(), "trefoil with z negated"),
    "figure_eight": (models.figure_eight_knot(), "(2 + cos 2u) cos 3u, (2 + cos 2u) sin 3u, sin 4u"),
    "cusp_model": (models.vertical_tangent_loop(), "projected tangent vanishes at u = 0"),
    "plane_figure_eight": (models.figure_eight_plane_curve(), "lemniscate in the plane z = 0; not embedded"),
    "limacon_curl": (models.limacon(0.6), "one-curl unknot"),
}

FAMILIES = {
    "constant_trefoil": (IsotopyFamily.constant(models.trefoil()), "no motion"),
    "curl_removal": (models.curl_removal_family(), "one-curl limacon straightened to a circle"),
    "cusp": (models.cusp_family(), "limacon b: 0.7 -> 1.3, curl shrinks through a cusp"),
    "tangency": (models.tangency_family(True), "opposite dents pushed through each other"),
    "tangency_same_side": (models.tangency_family(False), "one dent pushed through the far side"),
    "triple": (models.triple_family(), "a strand slides across a crossing"),
    "curl_then_dent": (models.cusp_then_tangency_family(), "R1 followed by R2"),
    "trefoil_to_mirror": (models.mirror_family(), "straight-line interpolation; not an isotopy"),
    "trefoil_perturbed": (models.perturbed_family(models.trefoil()), "small keyframe noise"),
    "trefoil_rotation": (models.rotation_family(models.trefoil(), (1.0, 0.0, 0.0), 0.3), "tilt about the x axis"),
}


def main():
    DATA.mkdir(exist_ok=True)
    for name, (loop, note) in LOOPS.items():
        (DATA / f"{name}.knot").write_text(f"# {note}\n" + format_loop(loop))
    for name, (fam, note) in FAMILIES.items():
        (DATA / f"{name}.iso").write_text(f"# {note}\n" + format_family(fam))


if __name__ == "__main__":
    main()
