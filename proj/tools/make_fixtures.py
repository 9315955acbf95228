#!/usr/bin/env python3
"""Regenerates the sample raster and road fixtures under fixtures/."""
import json
import math
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "fixtures"
LAT_M = 110540.0
IGNITION = (33.395, 35.125)
CELL = 30.0
N = 160


def lon_m(lat):
    return math.cos(math.radians(lat)) * 111320.0


def write_grid(path, values, xll, yll, nodata=None):
    with open(path, "w") as f:
        f.write(f"ncols {N}\nnrows {N}\nxllcorner {xll:.7f}\nyllcorner {yll:.7f}\ncellsize {CELL}\n")
        if nodata is not None:
            f.write(f"NODATA_value {nodata}\n")
        for row in values:
            f.write(" ".join(str(v) for v in row) + "\n")


def grid_origin():
    half = N * CELL / 2
    return IGNITION[0] - half / lon_m(IGNITION[1]), IGNITION[1] - half / LAT_M


def athalassa():
    out = ROOT / "athalassa"
    xll, yll = grid_origin()
    half = N * CELL / 2
    fuel, elev = [], []
    for r in range(N):
        frow, erow = [], []
        for c in range(N):
            # cell center relative to the ignition point, north up
            x = (c + 0.5) * CELL - half
            y = half - (r + 0.5) * CELL
            d = math.hypot(x, y)
            if math.hypot(x + 1500, y - 1400) < 350:
                f = 0  # reservoir
            elif d < 600:
                f = 2
            elif y < -1200:
                f = 4
            elif x > 1200:
                f = 3
            elif (int(x // 300) + int(y // 300)) % 3 == 0:
                f = 1
            else:
                f = 2
            frow.append(f)
            erow.append(round(150.0 + 0.02 * max(d - 600.0, 0.0) + 8.0 * math.sin(x / 700.0), 2))
        fuel.append(frow)
        elev.append(erow)
    write_grid(out / "fuel.asc", fuel, xll, yll, nodata=-9999)
    write_grid(out / "elevation.asc", elev, xll, yll, nodata=-9999)
    (out / "fuel_catalog.csv").write_text(
        "id,name,r0,wind_coeff,slope_coeff,moisture_class\n"
        "0,non-burnable,0,0,0,none\n"
        "1,grass,2.0,0.40,2.0,fine\n"
        "2,shrub,1.2,0.35,2.0,medium\n"
        "3,forest,0.6,0.30,2.5,heavy\n"
        "4,agricultural,1.5,0.40,1.5,fine\n")
    scenario = {
        "ignition": {"lon": IGNITION[0], "lat": IGNITION[1]},
        "ignition_time": "2023-06-10T14:00:00Z",
        "wind": {"speed": round(6.0 / 3.6, 6), "direction_to": 135.0},
        "humidity": 30.0,
        "temperature": 30.0,
        "horizon": 60,
        "ring_interval": 15,
    }
    (out / "scenario.json").write_text(json.dumps(scenario, indent=2) + "\n")

    # Escape corridor: starts 310 m north-west of the ignition and runs
    # north-west in 100 m hops. Only nodes from 800 m on are 1 km clear of
    # the 60-minute ring.
    ux, uy = -math.sqrt(0.5), math.sqrt(0.5)
    start = (310 * ux, 310 * uy)

    def geo(p):
        return [round(IGNITION[0] + p[0] / lon_m(IGNITION[1]), 8), round(IGNITION[1] + p[1] / LAT_M, 8)]

    corridor = [geo((start[0] + i * 100 * ux, start[1] + i * 100 * uy)) for i in range(11)]
    toward_fire = [corridor[0], geo((start[0] - 300 * ux, start[1] - 300 * uy))]
    branch_origin = (start[0] + 400 * ux, start[1] + 400 * uy)
    side = [corridor[4], geo((branch_origin[0] - 900, branch_origin[1] - 300)),
            geo((branch_origin[0] - 1500, branch_origin[1] - 900))]
    roads = {
        "type": "FeatureCollection",
        "features": [
            {"type": "Feature", "properties": {"name": "reserve trail", "modes": ["walking", "cycling", "driving"]},
             "geometry": {"type": "LineString", "coordinates": corridor}},
            {"type": "Feature", "properties": {"name": "picnic spur", "modes": ["walking", "cycling", "driving"]},
             "geometry": {"type": "LineString", "coordinates": toward_fire}},
            {"type": "Feature", "properties": {"name": "dam path", "modes": "walking"},
             "geometry": {"type": "LineString", "coordinates": side}},
        ],
    }
    (out / "roads.geojson").write_text(json.dumps(roads, indent=2) + "\n")
    (out / "start.txt").write_text(",".join(str(v) for v in geo(start)) + "\n")


def homogeneous():
    out = ROOT / "homogeneous"
    xll, yll = grid_origin()
    write_grid(out / "fuel.asc", [[1] * N for _ in range(N)], xll, yll)
    write_grid(out / "elevation.asc", [[100] * N for _ in range(N)], xll, yll)
    scenario = {
        "ignition": {"lon": IGNITION[0], "lat": IGNITION[1]},
        "ignition_time": "2023-06-10T14:00:00Z",
        "wind": {"speed": 0.0, "direction_to": 0.0},
        "humidity": 0.0,
        "temperature": 20.0,
        "horizon": 60,
        "ring_interval": 15,
    }
    (out / "scenario.json").write_text(json.dumps(scenario, indent=2) + "\n")


if __name__ == "__main__":
    athalassa()
    homogeneous()
