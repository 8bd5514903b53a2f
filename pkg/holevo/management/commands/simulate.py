"""
Random-coding experiment: mean decoding error over seeded random codebooks.

Usage:
    python manage.py simulate channel.json --n 2 --m 2 --trials 10000 --seed 42
    python manage.py simulate channel.json --n 2 --m 2 --trials 1000 --budget 0.3 --threads 4
    python manage.py simulate mixed.json --n 2 --m 2 --trials 200 --delta 0.3
"""

from holevo.quantum.capacity import CostConstraint
from holevo.quantum.errors import SpecParseError
from holevo.quantum.simulation import ExperimentConfig, estimate_expected_error

from ._base import HolevoCommand

COUNT_STATISTICS = ("trials", "rejections")


class Command(HolevoCommand):
    help = "Estimate the expected decoding error of random codes and compare with the bounds"

    def add_options(self, parser):
        parser.add_argument("--n", type=int, required=True, help="Block length")
        parser.add_argument("--m", type=int, required=True, help="Number of codewords M")
        parser.add_argument("--trials", type=int, required=True, help="Number of random codebooks")
        parser.add_argument("--seed", type=int, required=True, help="Master seed (unsigned 64-bit)")
        parser.add_argument("--budget", type=float, default=None, help="Per-letter cost budget E (uses spec costs)")
        parser.add_argument("--tilted", action="store_true", help="Propose constrained words from the tilted prior")
        parser.add_argument("--delta", type=float, default=None, help="Typical window width; required for mixed letters")
        parser.add_argument("--threads", type=int, default=1, help="Worker threads (results do not depend on it)")

    def compute(self, options):
        spec = self.load(options)
        constraint = None
        if options["budget"] is not None:
            if spec.costs is None:
                msg = f"{options['spec']} has no 'costs' entry; --budget needs one"
                raise SpecParseError(msg)
            constraint = CostConstraint(spec.costs, options["budget"])
        prior = self.prior_for(spec)
        cfg = ExperimentConfig(
            channel=spec.channel,
            prior=prior,
            n=options["n"],
            M=options["m"],
            trials=options["trials"],
            seed=options["seed"],
            delta=options["delta"],
            constraint=constraint,
            tilted=options["tilted"],
            threads=self.thread_count(options),
        )
        report = estimate_expected_error(cfg)

        outputs = {"empirical_mean_error": report.empirical_mean_error, "standard_error": report.standard_error}
        units = {"empirical_mean_error": "probability", "standard_error": "probability"}
        for name, value in report.bound_values.items():
            outputs[name] = value
            units[name] = "dimensionless" if name.endswith("s_opt") else "probability"
        for name, value in report.statistics.items():
            outputs[name] = value
            if name in COUNT_STATISTICS:
                units[name] = "count"
            elif name.endswith("ratio"):
                units[name] = "dimensionless"
            else:
                units[name] = "probability"

        inputs = {
            "spec": options["spec"],
            "n": options["n"],
            "M": options["m"],
            "trials": options["trials"],
            "budget": options["budget"],
            "tilted": options["tilted"],
            "delta": options["delta"],
            "prior": prior.probabilities,
        }
        return self.record(inputs, outputs, units, seed=options["seed"])
