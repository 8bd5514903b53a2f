"""
File formats: the channel spec, the codebook file and the result record.

All three are JSON documents tagged with a schema string. Complex numbers are
[re, im] pairs; letters are 0-based.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from rest_framework import serializers

from holevo.quantum.channel import CQChannel, Prior
from holevo.quantum.coding import Codebook
from holevo.quantum.errors import InvariantViolationError, SpecParseError
from holevo.quantum.operators import DensityOperator, PureState, trusted_density

CHANNEL_SCHEMA = "holevo.channel/v1"
CODEBOOK_SCHEMA = "holevo.codebook/v1"
RESULT_SCHEMA = "holevo.result/v1"

UNITS = ("bits", "nats", "probability", "count", "flag", "dimensionless")
SIGNIFICANT_DIGITS = 12


class ComplexField(serializers.Field):
    """A complex number written as [re, im]; a bare real number is also accepted."""

    default_error_messages = {"invalid": "Expected a number or an [re, im] pair."}

    def to_internal_value(self, data):
        if isinstance(data, bool):
            self.fail("invalid")
        if isinstance(data, int | float):
            return complex(data, 0.0)
        if not isinstance(data, list | tuple) or len(data) != 2:
            self.fail("invalid")
        try:
            value = complex(float(data[0]), float(data[1]))
        except (TypeError, ValueError):
            self.fail("invalid")
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            self.fail("invalid")
        return value

    def to_representation(self, value):
        value = complex(value)
        return [value.real, value.imag]


class StateSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=["pure", "mixed", "classical"])
    amplitudes = serializers.ListField(child=ComplexField(), required=False, min_length=1)
    matrix = serializers.ListField(
        child=serializers.ListField(child=ComplexField(), min_length=1), required=False, min_length=1
    )
    column = serializers.ListField(child=serializers.FloatField(), required=False, min_length=1)

    def validate(self, attrs):
        field = {"pure": "amplitudes", "mixed": "matrix", "classical": "column"}[attrs["kind"]]
        if field not in attrs:
            msg = f"A {attrs['kind']} state needs '{field}'"
            raise serializers.ValidationError(msg)
        return attrs


class ChannelSpecSerializer(serializers.Serializer):
    schema = serializers.CharField(required=False, default=CHANNEL_SCHEMA)
    dim = serializers.IntegerField(min_value=1)
    states = StateSerializer(many=True)
    prior = serializers.ListField(child=serializers.FloatField(), required=False)
    costs = serializers.ListField(child=serializers.FloatField(), required=False)

    def validate_schema(self, value):
        if value != CHANNEL_SCHEMA:
            msg = f"Unsupported schema {value!r}, expected {CHANNEL_SCHEMA!r}"
            raise serializers.ValidationError(msg)
        return value

    def validate(self, attrs):
        dim = attrs["dim"]
        letters = len(attrs["states"])
        if letters == 0:
            msg = "A channel needs at least one state"
            raise serializers.ValidationError(msg)
        for index, state in enumerate(attrs["states"]):
            if state["kind"] == "pure" and len(state["amplitudes"]) != dim:
                msg = f"State {index}: expected {dim} amplitudes"
                raise serializers.ValidationError(msg)
            if state["kind"] == "classical" and len(state["column"]) != dim:
                msg = f"State {index}: expected a column of {dim} probabilities"
                raise serializers.ValidationError(msg)
            if state["kind"] == "mixed" and (
                len(state["matrix"]) != dim or any(len(row) != dim for row in state["matrix"])
            ):
                msg = f"State {index}: expected a {dim}x{dim} matrix"
                raise serializers.ValidationError(msg)
        for name in ("prior", "costs"):
            if name in attrs and len(attrs[name]) != letters:
                msg = f"'{name}' has {len(attrs[name])} entries for {letters} states"
                raise serializers.ValidationError(msg)
        return attrs


class CodebookSerializer(serializers.Serializer):
    schema = serializers.CharField(required=False, default=CODEBOOK_SCHEMA)
    words = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=1),
        min_length=1,
    )

    def validate_schema(self, value):
        if value != CODEBOOK_SCHEMA:
            msg = f"Unsupported schema {value!r}, expected {CODEBOOK_SCHEMA!r}"
            raise serializers.ValidationError(msg)
        return value

    def validate_words(self, value):
        if len({len(word) for word in value}) != 1:
            msg = "All codewords must have the same length"
            raise serializers.ValidationError(msg)
        return value


class ResultRecordSerializer(serializers.Serializer):
    schema = serializers.CharField(default=RESULT_SCHEMA)
    command = serializers.CharField()
    inputs = serializers.DictField()
    outputs = serializers.DictField()
    units = serializers.DictField(child=serializers.ChoiceField(choices=UNITS))
    seed = serializers.IntegerField(allow_null=True, required=False, default=None)
    version = serializers.CharField()
    table = serializers.ListField(child=serializers.DictField(), required=False)
    table_units = serializers.DictField(child=serializers.ChoiceField(choices=UNITS), required=False)

    def validate(self, attrs):
        missing = sorted(set(attrs["outputs"]) - set(attrs["units"]))
        if missing:
            msg = f"Outputs without a unit: {', '.join(missing)}"
            raise serializers.ValidationError(msg)
        if "table" in attrs and attrs["table"]:
            columns = set(attrs["table"][0])
            untagged = sorted(columns - set(attrs.get("table_units", {})))
            if untagged:
                msg = f"Table columns without a unit: {', '.join(untagged)}"
                raise serializers.ValidationError(msg)
        return attrs


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    channel: CQChannel
    prior: Prior | None = None
    costs: np.ndarray | None = None


def _raise_invalid(serializer: serializers.Serializer, source: str) -> None:
    msg = f"{source}: {json.dumps(serializer.errors, sort_keys=True, default=str)}"
    raise SpecParseError(msg)


def _read_json(path) -> dict:
    try:
        with Path(path).open(encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        msg = f"Cannot read {path}: {exc}"
        raise SpecParseError(msg) from exc
    except json.JSONDecodeError as exc:
        msg = f"{path} is not valid JSON: {exc}"
        raise SpecParseError(msg) from exc


def build_channel(data: dict) -> ChannelSpec:
    """Validated spec data -> channel, optional prior and optional cost vector."""
    states = []
    vectors = []
    for state in data["states"]:
        if state["kind"] == "pure":
            vector = PureState(np.array(state["amplitudes"], dtype=complex))
            states.append(vector.projector())
            vectors.append(vector)
        elif state["kind"] == "mixed":
            states.append(DensityOperator(np.array(state["matrix"], dtype=complex)))
            vectors.append(None)
        else:
            column = np.array(state["column"], dtype=float)
            if np.any(column < 0) or abs(column.sum() - 1.0) > 1e-10:
                msg = "A classical column must be a probability vector"
                raise SpecParseError(msg)
            states.append(trusted_density(np.diag(column)))
            vectors.append(None)
    channel = CQChannel(states=tuple(states), vectors=tuple(vectors))
    prior = Prior(np.array(data["prior"])) if data.get("prior") is not None else None
    costs = np.array(data["costs"], dtype=float) if data.get("costs") is not None else None
    return ChannelSpec(channel=channel, prior=prior, costs=costs)


def parse_channel_spec(data: dict, source: str = "channel spec") -> ChannelSpec:
    serializer = ChannelSpecSerializer(data=data)
    if not serializer.is_valid():
        _raise_invalid(serializer, source)
    return build_channel(serializer.validated_data)


def load_channel_spec(path) -> ChannelSpec:
    return parse_channel_spec(_read_json(path), source=str(path))


def load_codebook(path) -> Codebook:
    serializer = CodebookSerializer(data=_read_json(path))
    if not serializer.is_valid():
        _raise_invalid(serializer, str(path))
    return Codebook.from_letters(serializer.validated_data["words"])


def channel_to_spec(ch: CQChannel, prior: Prior | None = None, costs=None) -> dict:
    """Inverse of parse_channel_spec: pure letters keep their vectors, others their matrices."""
    field = ComplexField()
    states = []
    for state, vector in zip(ch.states, ch.vectors, strict=True):
        if vector is not None:
            states.append({"kind": "pure", "amplitudes": [field.to_representation(a) for a in vector.vector]})
        else:
            rows = [[field.to_representation(a) for a in row] for row in state.matrix]
            states.append({"kind": "mixed", "matrix": rows})
    spec = {"schema": CHANNEL_SCHEMA, "dim": ch.dim, "states": states}
    if prior is not None:
        spec["prior"] = [float(p) for p in prior.probabilities]
    if costs is not None:
        spec["costs"] = [float(c) for c in np.asarray(costs, dtype=float)]
    return spec


def round_significant(value):
    """Round floats (recursively) to 12 significant digits; non-finite numbers become None."""
    if isinstance(value, dict):
        return {key: round_significant(item) for key, item in value.items()}
    if isinstance(value, list | tuple | np.ndarray):
        return [round_significant(item) for item in value]
    if isinstance(value, bool | np.bool_):
        return bool(value)
    if isinstance(value, int | np.integer):
        return int(value)
    if isinstance(value, float | np.floating):
        if not math.isfinite(value):
            return None
        return float(f"{float(value):.{SIGNIFICANT_DIGITS}g}")
    return value


def build_record(
    command: str,
    inputs: dict,
    outputs: dict,
    units: dict,
    version: str,
    seed: int | None = None,
    table: list[dict] | None = None,
    table_units: dict | None = None,
) -> dict:
    """Validated, rounded result record ready for json.dumps."""
    data = {
        "schema": RESULT_SCHEMA,
        "command": command,
        "inputs": round_significant(inputs),
        "outputs": round_significant(outputs),
        "units": units,
        "seed": seed,
        "version": version,
    }
    if table is not None:
        data["table"] = round_significant(table)
        data["table_units"] = table_units or {}
    serializer = ResultRecordSerializer(data=data)
    if not serializer.is_valid():
        msg = f"Result record is invalid: {serializer.errors}"
        raise InvariantViolationError(msg)
    return data


def dump_record(record: dict) -> str:
    return json.dumps(record, sort_keys=True, indent=2)
