"""
Lower estimate of the accessible information C1.

Usage:
    python manage.py accinfo channel.json --seed 7 --restarts 16 --threads 4
"""

from holevo.quantum.capacity import OptimizerOptions, accessible_information
from holevo.quantum.constants import ACCESSIBLE_RESTARTS, ACCESSIBLE_ROUNDS

from ._base import HolevoCommand


class Command(HolevoCommand):
    help = "Search priors and rank-1 measurements for the largest Shannon information"

    def add_options(self, parser):
        parser.add_argument("--seed", type=int, default=0, help="Seed for the random restarts")
        parser.add_argument("--restarts", type=int, default=ACCESSIBLE_RESTARTS, help="Random measurement restarts")
        parser.add_argument("--rounds", type=int, default=ACCESSIBLE_ROUNDS, help="Alternation rounds per restart")
        parser.add_argument("--threads", type=int, default=1, help="Worker threads (results do not depend on it)")

    def compute(self, options):
        spec = self.load(options)
        opts = OptimizerOptions(
            seed=options["seed"],
            restarts=options["restarts"],
            rounds=options["rounds"],
            threads=self.thread_count(options),
        )
        result = accessible_information(spec.channel, opts)
        outputs = {
            "c1_lower": result.value,
            "optimizer_prior": result.optimizer_prior.probabilities,
            "povm_outcomes": result.details["outcomes"],
            "best_restart": result.details["restart"],
            "rounds": result.iterations,
            "gradient_norm": result.gradient_norm,
            "converged": result.converged,
        }
        units = {
            "c1_lower": "bits",
            "optimizer_prior": "probability",
            "povm_outcomes": "count",
            "best_restart": "count",
            "rounds": "count",
            "gradient_norm": "dimensionless",
            "converged": "flag",
        }
        inputs = {"spec": options["spec"], "restarts": options["restarts"], "rounds": options["rounds"]}
        return self.record(inputs, outputs, units, seed=options["seed"])
