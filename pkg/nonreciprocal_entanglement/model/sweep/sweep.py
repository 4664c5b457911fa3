# Copyright (c) 2026, itsdave GmbH and contributors
# For license information, please see license.txt

import itertools
import json
import logging
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import pandas as pd

from nonreciprocal_entanglement.exceptions import ConfigError, OutputError, ValidationError, throw
from nonreciprocal_entanglement.hooks import fixtures, provenance_header
from nonreciprocal_entanglement.model.entanglement.entanglement import DEFAULT_PAIRS, contrast_ratio
from nonreciprocal_entanglement.model.params.params import (
	OVERRIDE_FIELDS,
	SAGNAC_KEYS,
	PhysicalParams,
	SagnacInput,
	load_params,
	reference_params,
	resolve,
	vary,
	vary_physical,
	vary_sagnac,
	with_direction,
)
from nonreciprocal_entanglement.pool import pool_map
from nonreciprocal_entanglement.tools import evaluate_point

logger = logging.getLogger(__name__)

SCALES = ("linear", "log")
OUTPUTS = ("stability", "entanglement", "contrast")
# unstable points are a result, not a failure
FAILURE_STATUSES = ("no-steady-state", "numerical-failure", "cm-unphysical", "invalid-parameter")
FLOAT_FORMAT = "%.11e"
PRESET_FIXTURE = fixtures[0]

PHYSICAL_AXES = tuple(name for name in PhysicalParams.__dataclass_fields__ if name != "sagnac")
SAGNAC_AXES = tuple(
	name for name in list(SagnacInput.__dataclass_fields__) + list(SAGNAC_KEYS)
	if name not in ("mode", "direction") and name not in SAGNAC_KEYS.values()
)
NORMALIZED_AXES = OVERRIDE_FIELDS + ("M", "N", "T")


@dataclass(frozen=True)
class Axis:
	path: str
	start: float
	stop: float
	count: int
	scale: str = "linear"
	couple_m: bool = False

	def __post_init__(self):
		level, _, name = self.path.partition(".")
		known = {"physical": PHYSICAL_AXES, "sagnac": SAGNAC_AXES, "normalized": NORMALIZED_AXES}
		if level not in known or name not in known[level]:
			throw(f"unknown parameter path {self.path!r}", ConfigError)
		if int(self.count) != self.count or self.count < 2:
			throw(f"axis {self.path} needs count >= 2, got {self.count}", ConfigError)
		if self.scale not in SCALES:
			throw(f"axis {self.path}: scale must be one of {SCALES}, got {self.scale!r}", ConfigError)
		if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
			throw(f"axis {self.path}: log scale needs positive bounds", ConfigError)
		if self.couple_m and name != "N":
			throw(f"axis {self.path}: couple_m only applies to N", ConfigError)

	@property
	def level(self):
		return self.path.partition(".")[0]

	@property
	def name(self):
		return self.path.partition(".")[2]

	@property
	def values(self):
		if self.scale == "log":
			return np.geomspace(self.start, self.stop, int(self.count))
		return np.linspace(self.start, self.stop, int(self.count))

	@classmethod
	def from_dict(cls, d):
		try:
			return cls(
				path=d["path"],
				start=float(d["start"]),
				stop=float(d["stop"]),
				count=int(d["count"]),
				scale=d.get("scale", "linear"),
				couple_m=bool(d.get("couple_m", False)),
			)
		except (KeyError, TypeError, ValueError) as e:
			throw(f"malformed axis {d!r}: {e}", ConfigError)


@dataclass(frozen=True)
class SweepSpec:
	base: PhysicalParams
	axes: tuple = ()
	paired_spin: bool = False
	outputs: tuple = None
	name: str = "sweep"
	include_reference: bool = False
	overrides: dict = field(default_factory=dict)
	pairs: tuple = DEFAULT_PAIRS

	def __post_init__(self):
		if len(self.axes) > 2:
			throw(f"{self.name}: at most two axes, got {len(self.axes)}", ConfigError)
		if self.outputs is None:
			default = ("stability", "entanglement") + (("contrast",) if self.paired_spin else ())
			object.__setattr__(self, "outputs", default)
		unknown = [o for o in self.outputs if o not in OUTPUTS]
		if unknown:
			throw(f"{self.name}: unknown output(s) {unknown}, expected {OUTPUTS}", ConfigError)
		if "contrast" in self.outputs and not self.paired_spin:
			throw(f"{self.name}: contrast needs paired_spin", ConfigError)
		if self.include_reference and not self.paired_spin:
			throw(f"{self.name}: include_reference needs paired_spin", ConfigError)

	@classmethod
	def from_file(cls, path, **kwargs):
		base, overrides = load_params(path)
		return cls(base=base, overrides=overrides, **kwargs)

	@property
	def spins(self):
		if not self.paired_spin:
			return (None,)
		return (("none",) if self.include_reference else ()) + ("CW", "CCW")

	def header(self):
		columns = [axis.path for axis in self.axes]
		columns += ["spin", "Delta_F", "status", "stable", "margin", "method_agreement",
			"branch_count", "selected_u", "multistable"]
		labels = [pair.label for pair in self.pairs]
		if "entanglement" in self.outputs:
			columns += ["bona_fide", "bona_fide_min_eig"]
			columns += [f"E_{label}" for label in labels]
			columns += [f"zeta_{label}" for label in labels]
		if "contrast" in self.outputs:
			for label in labels:
				columns += [f"C_{label}", f"C_{label}_undefined"]
		return tuple(columns)


@dataclass
class ResultTable:
	header: tuple
	rows: list
	provenance: list

	def to_frame(self):
		return pd.DataFrame(self.rows, columns=list(self.header))

	def statuses(self):
		index = self.header.index("status")
		return [row[index] for row in self.rows]

	def failed(self):
		return sum(1 for status in self.statuses() if status in FAILURE_STATUSES)


def _point_params(spec, assignment):
	p = spec.base
	for axis, value in assignment:
		if axis.level == "physical":
			p = vary_physical(p, axis.name, value, axis.couple_m)
		elif axis.level == "sagnac":
			p = vary_sagnac(p, axis.name, value)
	np_ = resolve(p, spec.overrides)
	for axis, value in assignment:
		if axis.level == "normalized":
			np_ = vary(np_, axis.name, value, axis.couple_m)
	return np_


def _row(spec, assignment, spin, np_, result, status=None):
	nan = float("nan")
	solution = result.solution if result else None
	stability = result.stability if result else None
	row = {axis.path: float(value) for axis, value in assignment}
	row.update(
		spin=spin,
		Delta_F=np_.Delta_F if np_ is not None else nan,
		status=status or result.status,
		stable=bool(stability.stable) if stability else False,
		margin=stability.margin if stability else nan,
		method_agreement=bool(stability.method_agreement) if stability else False,
		branch_count=len(solution.branches) if solution else 0,
		selected_u=result.steady_state.u if result and result.steady_state else nan,
		multistable=bool(solution.multistable) if solution else False,
		bona_fide=bool(result.bona_fide) if result and result.bona_fide is not None else False,
		bona_fide_min_eig=result.bona_fide_min_eig if result else nan,
	)
	for pair in spec.pairs:
		report = result.reports.get(pair.label) if result else None
		row[f"E_{pair.label}"] = report.E_N if report else nan
		row[f"zeta_{pair.label}"] = report.zeta if report else nan
	return row


def _add_contrast(spec, rows):
	by_spin = {row["spin"]: row for row in rows}
	plus, minus = by_spin.get("CW"), by_spin.get("CCW")
	for pair in spec.pairs:
		C, undefined = float("nan"), True
		column = f"E_{pair.label}"
		if plus is not None and minus is not None and math.isfinite(plus[column]) and math.isfinite(minus[column]):
			result = contrast_ratio(plus[column], minus[column], pair)
			C, undefined = result.C, result.undefined
		for row in rows:
			# the reference row has no partner, its contrast stays undefined
			if row["spin"] in ("CW", "CCW"):
				row[f"C_{pair.label}"], row[f"C_{pair.label}_undefined"] = C, undefined
			else:
				row[f"C_{pair.label}"], row[f"C_{pair.label}_undefined"] = float("nan"), True


def _sweep_point(task):
	spec, assignment, branch, method = task
	try:
		np_ = _point_params(spec, assignment)
	except ValidationError as e:
		logger.warning("%s: point %s rejected: %s", spec.name, _describe(assignment), e)
		spins = [s if s is not None else spec.base.sagnac.direction for s in spec.spins]
		rows = [_row(spec, assignment, spin, None, None, status=e.status) for spin in spins]
	else:
		rows = []
		for spin in spec.spins:
			point = with_direction(np_, spin) if spin is not None else np_
			result = evaluate_point(point, branch, spec.pairs, method)
			if not result.ok:
				logger.warning("%s: point %s spin %s: %s %s", spec.name, _describe(assignment),
					point.direction, result.status, result.message)
			rows.append(_row(spec, assignment, point.direction, point, result))
	if "contrast" in spec.outputs:
		_add_contrast(spec, rows)
	header = spec.header()
	return [tuple(row[column] for column in header) for row in rows]


def _describe(assignment):
	return ", ".join(f"{axis.path}={value:g}" for axis, value in assignment)


def provenance(spec):
	lines = [f"{key}: {value}" for key, value in provenance_header().items()]
	lines.append(f"sweep: {spec.name}")
	lines.append(f"spins: {', '.join(s or spec.base.sagnac.direction for s in spec.spins)}")
	for axis in spec.axes:
		lines.append(f"axis: {axis.path} {axis.start!r} {axis.stop!r} {axis.count} {axis.scale}"
			+ (" couple_m" if axis.couple_m else ""))
	try:
		for key, value in resolve(spec.base, spec.overrides).as_dict().items():
			lines.append(f"parameter: {key} = {value!r}")
	except ValidationError as e:
		lines.append(f"parameter: unresolved ({e})")
	for key, value in sorted(spec.overrides.items()):
		lines.append(f"override: {key} = {value!r}")
	return lines


def run_sweep(spec, jobs=1, branch=None, method="kronecker"):
	"""Evaluate every grid point of spec; rows in grid-major order, spins innermost.

	A failing point only sets its status column, the sweep always completes.
	"""
	header = spec.header()
	if not spec.axes:
		return ResultTable(header, [], provenance(spec))

	grid = itertools.product(*[[(axis, value) for value in axis.values] for axis in spec.axes])
	tasks = [(spec, tuple(assignment), branch, method) for assignment in grid]
	logger.info("%s: %d points x %d spin(s), %d job(s)", spec.name, len(tasks), len(spec.spins), jobs)

	rows = []
	for point_rows in pool_map(_sweep_point, tasks, jobs):
		rows.extend(point_rows)
	table = ResultTable(header, rows, provenance(spec))

	logger.info("%s: finished, %d of %d rows failed", spec.name, table.failed(), len(rows))
	return table


def _json_value(value):
	if isinstance(value, (bool, np.bool_)):
		return bool(value)
	if isinstance(value, (int, np.integer)):
		return int(value)
	if isinstance(value, (float, np.floating)):
		if not math.isfinite(value):
			return None
		return float(FLOAT_FORMAT % value)
	return value


def emit(table, path, format="csv"):
	"""Write table to path as CSV (with # provenance lines) or as a JSON array of objects."""
	if format not in ("csv", "json"):
		throw(f"unknown output format {format!r}", ConfigError)
	try:
		with open(path, "w", encoding="utf-8", newline="") as f:
			if format == "csv":
				for line in table.provenance:
					f.write(f"# {line}\n")
				table.to_frame().to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
			else:
				records = [
					{column: _json_value(value) for column, value in zip(table.header, row)}
					for row in table.rows
				]
				json.dump(records, f, indent=1)
				f.write("\n")
	except OSError as e:
		throw(f"cannot write {path}: {e.strerror or e}", OutputError)
	logger.info("wrote %d rows to %s", len(table.rows), path)


def read_csv(path):
	"""Load an emitted CSV back into a DataFrame."""
	return pd.read_csv(path, comment="#")


@lru_cache(maxsize=1)
def _preset_records():
	path = os.path.join(os.path.dirname(__file__), "..", "..", "fixtures", f"{PRESET_FIXTURE}.json")
	with open(path, encoding="utf-8") as f:
		return json.load(f)


def _preset_spec(record, part, base, overrides):
	p = base
	for name, value in part.get("physical", {}).items():
		p = vary_physical(p, name, value)
	for name, value in part.get("sagnac", {}).items():
		p = vary_sagnac(p, name, value)
	merged = dict(overrides or {})
	merged.update(part.get("overrides", {}))
	outputs = part.get("outputs")
	return SweepSpec(
		base=p,
		axes=tuple(Axis.from_dict(a) for a in part["axes"]),
		paired_spin=part.get("paired_spin", False),
		outputs=tuple(outputs) if outputs else None,
		name=f"{record['name']}/{part['part']}",
		include_reference=part.get("include_reference", False),
		overrides=merged,
	)


def presets(base=None, overrides=None):
	"""Built-in figure presets: {name: tuple of SweepSpec parts}, on base (default: reference set)."""
	base = base if base is not None else reference_params()
	return {
		record["name"]: tuple(_preset_spec(record, part, base, overrides) for part in record["parts"])
		for record in _preset_records()
	}
