# Copyright (c) 2026, itsdave GmbH and contributors
# For license information, please see license.txt

import configparser
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache

from scipy.constants import Boltzmann as kB
from scipy.constants import c as speed_of_light
from scipy.constants import hbar

from nonreciprocal_entanglement.exceptions import ConfigError, InvalidParameterError, throw

logger = logging.getLogger(__name__)

DIRECTIONS = ("CW", "CCW", "none")
SIGN = {"CW": 1.0, "CCW": -1.0, "none": 0.0}

# fields divided by omega_m on normalization
RATE_FIELDS = ("kappa1", "kappa2", "gamma1", "gamma2", "Delta_c1", "Delta_c2", "E1", "E2", "J1", "J2")
NONNEGATIVE_FIELDS = ("g_m", "kappa1", "kappa2", "gamma1", "gamma2", "E1", "E2", "J1", "J2")
OVERRIDE_FIELDS = RATE_FIELDS + ("E", "g_m", "Delta_F", "nbar_B1", "nbar_B2")

# "lambda" is a keyword, the dataclass stores it as wavelength
SAGNAC_KEYS = {"lambda": "wavelength"}


@lru_cache(maxsize=1)
def load_schema():
	path = os.path.join(os.path.dirname(__file__), "params.json")
	with open(path, encoding="utf-8") as f:
		doc = json.load(f)
	return doc["sections"]


def _defaults(section):
	out = {}
	for df in load_schema()[section]:
		if "default" in df:
			out[SAGNAC_KEYS.get(df["fieldname"], df["fieldname"])] = df["default"]
	return out


@dataclass(frozen=True)
class SagnacInput:
	mode: str = "explicit"
	explicit_shift: float = 0.1
	n: float = 1.4
	R: float = 2.5e-4
	Omega: float = 0.0
	wavelength: float = 1.55e-6
	dn_dlambda: float = 0.0
	omega_c1: float = 2 * math.pi * 193.4e12
	direction: str = "CW"


@dataclass(frozen=True)
class PhysicalParams:
	"""Parameter set in SI units (rad/s, K); M and N are molecule counts."""

	omega_m: float
	g_m: float
	kappa1: float
	kappa2: float
	gamma1: float
	gamma2: float
	Delta_c1: float
	Delta_c2: float
	E1: float
	E2: float
	J1: float
	J2: float
	M: float
	N: float
	T: float
	sagnac: SagnacInput = field(default_factory=SagnacInput)

	def validate(self):
		values = asdict(self)
		values.pop("sagnac")
		for name, value in values.items():
			if not math.isfinite(value):
				throw(f"{name} must be finite, got {value}", InvalidParameterError)
		if self.omega_m <= 0:
			throw(f"omega_m must be positive, got {self.omega_m}", InvalidParameterError)
		for name in NONNEGATIVE_FIELDS:
			if values[name] < 0:
				throw(f"{name} must not be negative, got {values[name]}", InvalidParameterError)
		_check_counts(self.M, self.N)
		if self.T < 0:
			throw(f"T must not be negative, got {self.T}", InvalidParameterError)
		if self.sagnac.direction not in DIRECTIONS:
			throw(f"unknown spin direction {self.sagnac.direction!r}", InvalidParameterError)
		return self


@dataclass(frozen=True)
class NormalizedParams:
	"""Single source of truth for one simulation point, everything in units of omega_m.

	omega_m itself stays in rad/s so occupancies can be re-derived when T changes.
	"""

	omega_m: float
	g_m: float
	kappa1: float
	kappa2: float
	gamma1: float
	gamma2: float
	Delta_c1: float
	Delta_c2: float
	E1: float
	E2: float
	J1: float
	J2: float
	M: float
	N: float
	T: float
	Delta_F: float
	direction: str
	shift_magnitude: float
	nbar_B1: float
	nbar_B2: float
	g1: float
	g2: float

	@property
	def Delta(self):
		return self.Delta_c1 - self.Delta_F

	def as_dict(self):
		return asdict(self)


def _check_counts(M, N):
	if M <= 0:
		throw(f"M must be positive, got {M}", InvalidParameterError)
	if M >= N:
		throw(f"M={M} must be smaller than N={N}, g2 is undefined otherwise", InvalidParameterError)


def sagnac_shift(s, omega_m):
	"""Signed Sagnac-Fizeau shift in units of omega_m (CW positive, CCW negative)."""
	if s.direction not in DIRECTIONS:
		throw(f"unknown spin direction {s.direction!r}", InvalidParameterError)
	sign = SIGN[s.direction]

	if s.mode == "explicit":
		if s.explicit_shift is None:
			throw("explicit mode requires explicit_shift", InvalidParameterError)
		return sign * abs(s.explicit_shift)
	if s.mode != "physical":
		throw(f"unknown sagnac mode {s.mode!r}", InvalidParameterError)

	if omega_m <= 0:
		throw(f"omega_m must be positive, got {omega_m}", InvalidParameterError)
	for name in ("n", "R", "wavelength"):
		value = getattr(s, name)
		if value is None or value <= 0:
			throw(f"sagnac {name} must be positive in physical mode, got {value}", InvalidParameterError)
	if s.Omega is None or s.Omega < 0:
		throw(f"sagnac Omega must not be negative, got {s.Omega}", InvalidParameterError)

	dispersion = 1.0 - 1.0 / s.n ** 2 - (s.wavelength / s.n) * s.dn_dlambda
	magnitude = s.n * s.Omega * s.R * s.omega_c1 / speed_of_light * dispersion
	return sign * magnitude / omega_m


def thermal_occupancy(omega, T):
	"""Bose-Einstein occupancy of a mode at angular frequency omega (rad/s) and temperature T (K)."""
	if omega <= 0:
		throw(f"omega must be positive, got {omega}", InvalidParameterError)
	if T < 0:
		throw(f"T must not be negative, got {T}", InvalidParameterError)
	if T == 0:
		return 0.0
	x = hbar * omega / (kB * T)
	if x > 700:
		return math.exp(-x)
	return 1.0 / math.expm1(x)


def normalize(p):
	p.validate()
	w = p.omega_m
	g_m = p.g_m / w
	nbar = thermal_occupancy(w, p.T)
	magnitude = abs(sagnac_shift(replace(p.sagnac, direction="CW"), w))
	values = {name: getattr(p, name) / w for name in RATE_FIELDS}
	return NormalizedParams(
		omega_m=w,
		g_m=g_m,
		M=p.M,
		N=p.N,
		T=p.T,
		Delta_F=SIGN[p.sagnac.direction] * magnitude,
		direction=p.sagnac.direction,
		shift_magnitude=magnitude,
		nbar_B1=nbar,
		nbar_B2=nbar,
		g1=g_m * math.sqrt(p.M),
		g2=g_m * math.sqrt(p.N - p.M),
		**values,
	)


def denormalize(np_):
	"""Inverse of normalize; the shift comes back in explicit mode."""
	w = np_.omega_m
	values = {name: getattr(np_, name) * w for name in RATE_FIELDS}
	sagnac = SagnacInput(mode="explicit", explicit_shift=np_.shift_magnitude, direction=np_.direction)
	return PhysicalParams(omega_m=w, g_m=np_.g_m * w, M=np_.M, N=np_.N, T=np_.T, sagnac=sagnac, **values)


def _rederive(np_, occupancy=False):
	_check_counts(np_.M, np_.N)
	changes = {
		"g1": np_.g_m * math.sqrt(np_.M),
		"g2": np_.g_m * math.sqrt(np_.N - np_.M),
	}
	if occupancy:
		nbar = thermal_occupancy(np_.omega_m, np_.T)
		changes.update(nbar_B1=nbar, nbar_B2=nbar)
	return replace(np_, **changes)


def _check_normalized(np_):
	for name in NONNEGATIVE_FIELDS + ("nbar_B1", "nbar_B2"):
		value = getattr(np_, name)
		if not math.isfinite(value) or value < 0:
			throw(f"{name} must be a finite nonnegative number, got {value}", InvalidParameterError)


def apply_overrides(np_, overrides):
	"""Apply [normalized-overrides] values (omega_m units) on top of a normalized set."""
	if not overrides:
		return np_
	changes = dict(overrides)
	unknown = sorted(set(changes) - set(OVERRIDE_FIELDS))
	if unknown:
		throw(f"unknown normalized override(s): {', '.join(unknown)}", ConfigError)

	if "E" in changes:
		E = changes.pop("E")
		changes.setdefault("E1", E)
		changes.setdefault("E2", E)
	if "Delta_F" in changes:
		# magnitude only, the sign follows the spin direction
		magnitude = abs(changes.pop("Delta_F"))
		changes["shift_magnitude"] = magnitude
		changes["Delta_F"] = SIGN[np_.direction] * magnitude

	updated = replace(np_, **{k: float(v) for k, v in changes.items()})
	if "g_m" in changes:
		updated = _rederive(updated)
	_check_normalized(updated)
	return updated


def vary(np_, name, value, couple_m=False):
	"""Return np_ with one normalized-level parameter changed and derived values updated.

	With couple_m a change of N keeps the ratio M/N.
	"""
	if name in OVERRIDE_FIELDS:
		return apply_overrides(np_, {name: value})
	value = float(value)
	if name == "N":
		M = np_.M * value / np_.N if couple_m else np_.M
		return _rederive(replace(np_, N=value, M=M))
	if name == "M":
		return _rederive(replace(np_, M=value))
	if name == "T":
		return _rederive(replace(np_, T=value), occupancy=True)
	throw(f"parameter {name!r} cannot be varied on the normalized level", InvalidParameterError)


def vary_physical(p, name, value, couple_m=False):
	"""Same as vary, for a PhysicalParams set (SI units)."""
	if name not in PhysicalParams.__dataclass_fields__ or name == "sagnac":
		throw(f"unknown physical parameter {name!r}", InvalidParameterError)
	value = float(value)
	if name == "N" and couple_m:
		return replace(p, N=value, M=p.M * value / p.N)
	return replace(p, **{name: value})


def vary_sagnac(p, name, value):
	attr = SAGNAC_KEYS.get(name, name)
	if attr not in SagnacInput.__dataclass_fields__:
		throw(f"unknown sagnac parameter {name!r}", InvalidParameterError)
	if attr not in ("mode", "direction"):
		value = float(value)
	return replace(p, sagnac=replace(p.sagnac, **{attr: value}))


def with_direction(np_, direction):
	if direction not in DIRECTIONS:
		throw(f"unknown spin direction {direction!r}", InvalidParameterError)
	return replace(np_, direction=direction, Delta_F=SIGN[direction] * np_.shift_magnitude)


def _coerce(df, raw, source):
	if df["fieldtype"] == "Select":
		options = df["options"].split("\n")
		if raw not in options:
			throw(f"{source}: {df['fieldname']} must be one of {options}, got {raw!r}", ConfigError)
		return raw
	try:
		return float(raw)
	except ValueError:
		throw(f"{source}: {df['fieldname']} is not a number: {raw!r}", ConfigError)


def parse_params(text, source="<string>"):
	"""Parse a parameter file body into (PhysicalParams, normalized overrides)."""
	parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
	parser.optionxform = str
	try:
		parser.read_string(text, source=source)
	except configparser.Error as e:
		throw(f"{source}: {e}", ConfigError)

	schema = load_schema()
	if parser.defaults():
		throw(f"{source}: a [DEFAULT] section is not supported", ConfigError)
	unknown = [s for s in parser.sections() if s not in schema]
	if unknown:
		throw(f"{source}: unknown section(s) {unknown}, expected {list(schema)}", ConfigError)

	values = {section: {} for section in schema}
	for section in parser.sections():
		known = {df["fieldname"]: df for df in schema[section]}
		for key, raw in parser.items(section):
			if key not in known:
				throw(f"{source}: unknown key {key!r} in [{section}]", ConfigError)
			values[section][key] = _coerce(known[key], raw, source)

	sagnac_values = _defaults("sagnac")
	sagnac_values.update({SAGNAC_KEYS.get(k, k): v for k, v in values["sagnac"].items()})
	physical_values = _defaults("physical")
	physical_values.update(values["physical"])

	p = PhysicalParams(sagnac=SagnacInput(**sagnac_values), **physical_values)
	p.validate()
	overrides = values["normalized-overrides"]
	logger.debug("parsed %s: %d physical, %d sagnac, %d override values", source,
		len(values["physical"]), len(values["sagnac"]), len(overrides))
	return p, overrides


def load_params(path):
	try:
		with open(path, encoding="utf-8") as f:
			text = f.read()
	except OSError as e:
		throw(f"cannot read parameter file {path}: {e}", ConfigError)
	return parse_params(text, source=str(path))


def reference_params():
	"""The parameter set of the reference operating point (schema defaults)."""
	return parse_params("", source="<defaults>")[0]


def resolve(p, overrides=None):
	"""normalize + overrides, the way every simulation point is built."""
	return apply_overrides(normalize(p), overrides or {})
