"""Reachability index over a planar slice of a two-link arm's workspace.

Builds a coarse map, prints it as a character grid (# most suitable,
+ suitable, . unsuitable) and compares a few cells against a denser
sample count.
"""

from collabplan.capability import (
    PlanarTwoLinkArm,
    RegionClass,
    build_capability_map,
    classify_region,
    export_map,
    lookup_index,
)
from collabplan.model import Box, Point3, Region

SYMBOL = {RegionClass.MOST_SUITABLE: "#", RegionClass.SUITABLE: "+", RegionClass.UNSUITABLE: "."}


def main():
    arm = PlanarTwoLinkArm(Point3(0, 0, 0), link1_m=0.4, link2_m=0.3)
    bounds = Region.from_boxes([Box(Point3(-0.8, -0.8, 0), Point3(0.8, 0.8, 0))])
    cmap = build_capability_map(arm, bounds, cell_m=0.08, n=200, seed=0, robot_id="arm")

    nx, ny, _ = cmap.dims
    for j in reversed(range(ny)):
        print("".join(SYMBOL[classify_region(cmap.index[i, j, 0])] for i in range(nx)))
    print()

    dense = build_capability_map(arm, bounds, cell_m=0.08, n=5000, seed=1)
    for p in (Point3(0.2, 0.0, 0), Point3(0.45, 0.3, 0), Point3(0.68, 0.0, 0)):
        print(f"D at ({p.x:+.2f}, {p.y:+.2f}): {lookup_index(cmap, p):6.2f} with 200 samples, "
              f"{lookup_index(dense, p):6.2f} with 5000")

    csv_bytes = export_map(cmap, "csv")
    print(f"\nCSV export: {len(csv_bytes)} bytes, first row: {csv_bytes.decode().splitlines()[2]}")


if __name__ == "__main__":
    main()
