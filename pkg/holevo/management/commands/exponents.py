"""
Random-coding and expurgated exponents over a rate grid.

Usage:
    python manage.py exponents channel.json --rmin 0 --rmax 0.8 --steps 41
    python manage.py exponents channel.json --kind random --csv curve.csv
"""

import numpy as np

from holevo.quantum.capacity import maximize_holevo
from holevo.quantum.constants import S_CAP
from holevo.quantum.exponents import EXPURGATED, RANDOM, ExponentOptions, exponent_curve

from ._base import HolevoCommand


class Command(HolevoCommand):
    help = "Tabulate E_r(R) and E_ex(R)"

    def add_options(self, parser):
        parser.add_argument("--rmin", type=float, default=0.0, help="Smallest rate in bits (default: 0)")
        parser.add_argument("--rmax", type=float, default=None, help="Largest rate in bits (default: C-bar)")
        parser.add_argument("--steps", type=int, default=21, help="Number of rates (default: 21)")
        parser.add_argument(
            "--kind",
            choices=[RANDOM, EXPURGATED, "both"],
            default="both",
            help="Which exponent to tabulate; expurgated needs pure letters (default: both)",
        )
        parser.add_argument("--s-max", type=float, default=S_CAP, help="Cap on s for the expurgated exponent")
        parser.add_argument("--csv", type=str, default=None, help="Also write the table to this CSV file")

    def compute(self, options):
        spec = self.load(options)
        ch = spec.channel
        c_bar = maximize_holevo(ch).value
        rmax = c_bar if options["rmax"] is None else options["rmax"]
        rates = np.linspace(options["rmin"], rmax, max(options["steps"], 1))
        exponent_options = ExponentOptions(s_max=options["s_max"])

        kinds = [RANDOM, EXPURGATED] if options["kind"] == "both" else [options["kind"]]
        if options["kind"] == "both" and not ch.is_pure:
            kinds = [RANDOM]
        frame = None
        for kind in kinds:
            curve = exponent_curve(ch, rates, kind, exponent_options).to_frame()
            suffix = "r" if kind == RANDOM else "ex"
            curve = curve.rename(
                columns={"exponent": f"e_{suffix}", "s_opt": f"s_{suffix}", "saturated": f"saturated_{suffix}"}
            )
            curve = curve.drop(columns=[c for c in curve.columns if c.startswith("prior_")])
            frame = curve if frame is None else frame.merge(curve, on="rate")
        if options["csv"]:
            self.write_csv(frame, options["csv"])

        table_units = {"rate": "bits"}
        for column in frame.columns:
            if column.startswith("e_"):
                table_units[column] = "bits"
            elif column.startswith("s_"):
                table_units[column] = "dimensionless"
            elif column.startswith("saturated_"):
                table_units[column] = "flag"
        inputs = {
            "spec": options["spec"],
            "rmin": options["rmin"],
            "rmax": rmax,
            "steps": options["steps"],
            "kinds": kinds,
            "s_max": options["s_max"],
        }
        outputs = {"c_bar": c_bar, "points": len(frame)}
        units = {"c_bar": "bits", "points": "count"}
        return self.record(inputs, outputs, units, table=frame.to_dict(orient="records"), table_units=table_units)
