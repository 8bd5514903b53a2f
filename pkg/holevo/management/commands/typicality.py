"""
Typical-subspace sweep: leakage and norm of the projected tensor power for n = nmin..nmax.

Usage:
    python manage.py typicality channel.json --delta 0.2 --nmax 10
    python manage.py typicality channel.json --delta 0.2 --nmax 10 --csv sweep.csv
"""

from holevo.quantum.simulation import typicality_sweep

from ._base import HolevoCommand


class Command(HolevoCommand):
    help = "Tabulate typical-projector properties over block lengths"

    def add_options(self, parser):
        parser.add_argument("--delta", type=float, required=True, help="Width of the typical window in bits")
        parser.add_argument("--nmax", type=int, required=True, help="Largest block length")
        parser.add_argument("--nmin", type=int, default=1, help="Smallest block length (default: 1)")
        parser.add_argument("--csv", type=str, default=None, help="Also write the table to this CSV file")

    def compute(self, options):
        spec = self.load(options)
        prior = self.prior_for(spec)
        frame = typicality_sweep(spec.channel, prior, options["delta"], range(options["nmin"], options["nmax"] + 1))
        if options["csv"]:
            self.write_csv(frame, options["csv"])
        table_units = {
            "n": "count",
            "leakage": "probability",
            "norm": "dimensionless",
            "bound": "dimensionless",
            "typical_dimension": "count",
        }
        inputs = {
            "spec": options["spec"],
            "delta": options["delta"],
            "nmin": options["nmin"],
            "nmax": options["nmax"],
            "prior": prior.probabilities,
        }
        outputs = {"rows": len(frame)}
        return self.record(
            inputs, outputs, {"rows": "count"}, table=frame.to_dict(orient="records"), table_units=table_units
        )
