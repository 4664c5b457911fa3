# Copyright (c) 2026, itsdave GmbH and contributors
# For license information, please see license.txt

import logging

logger = logging.getLogger(__name__)


class ValidationError(Exception):
    status = "numerical-failure"


class InvalidParameterError(ValidationError):
    status = "invalid-parameter"


class ConfigError(ValidationError):
    status = "invalid-parameter"


class NoSteadyStateError(ValidationError):
    status = "no-steady-state"


class NumericalFailureError(ValidationError):
    status = "numerical-failure"

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        # e.g. the Routh verdict when the eigensolver gave up
        self.partial = partial


class PreconditionError(ValidationError):
    status = "unstable"


class UnphysicalSubmatrixError(ValidationError):
    status = "cm-unphysical"


class IntegrationTimeoutError(ValidationError):
    status = "numerical-failure"

    def __init__(self, msg, last_iterate=None):
        super().__init__(msg)
        self.last_iterate = last_iterate


class OutputError(OSError):
    status = "io"


def throw(msg, exc=ValidationError, **kwargs):
    """Raise `exc` with `msg`, logging it at debug level first."""
    logger.debug("%s: %s", exc.__name__, msg)
    raise exc(msg, **kwargs)
