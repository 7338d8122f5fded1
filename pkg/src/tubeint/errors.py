"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class TubeIntError(Exception):
    """Base class for all library errors."""


class NonPositive(TubeIntError):
    """A parameter that must be strictly positive is not."""

    def __init__(self, name: str, value: float):
        self.name = name
        self.value = value
        super().__init__(f"{name} must be > 0 and finite, got {value!r}")


class InconsistentEpsilon(TubeIntError):
    """epsilon and (c1, c2, omega) were both supplied and disagree."""

    def __init__(self, given: float, recomputed: float):
        self.given = given
        self.recomputed = recomputed
        super().__init__(
            f"epsilon={given!r} inconsistent with sqrt(c1^2+c2^2)/omega^3={recomputed!r}"
        )


class PositivityViolation(TubeIntError):
    """An integrator stage evaluated the coefficient solution at y <= 0.

    True solutions are strictly positive; hitting this means the step is too
    large or the parameters left the usable regime.
    """

    def __init__(self, t: float, value: float):
        self.t = t
        self.value = value
        super().__init__(f"y <= 0 at an integration stage (t={t!r}, y={value!r})")


class PositivityViolationW(TubeIntError):
    """An integrator stage evaluated the auxiliary amplitude at w <= 0."""

    def __init__(self, t: float, value: float):
        self.t = t
        self.value = value
        super().__init__(f"w <= 0 at an integration stage (t={t!r}, w={value!r})")


class NonFinite(TubeIntError):
    """State overflowed or became NaN during integration."""

    def __init__(self, t: float):
        self.t = t
        super().__init__(f"non-finite state at t={t!r}")


class Escape(TubeIntError):
    """|z| exceeded the escape threshold of the cubic potential."""

    def __init__(self, t: float):
        self.t = t
        super().__init__(f"oscillator escaped the cubic potential at t={t!r}")


class NonPositiveY(TubeIntError):
    """A coefficient-state record with y <= 0 was constructed or consumed."""


class NonPositiveW(TubeIntError):
    """An auxiliary-amplitude value w <= 0 was consumed."""


class NonPositiveF(TubeIntError):
    """Spline overshoot drove the driver coefficient f(t) to <= 0."""

    def __init__(self, t: float, value: float):
        self.t = t
        self.value = value
        super().__init__(
            f"driver coefficient f({t!r}) = {value!r} <= 0; reduce the modulation depth"
        )


class UnsupportedOmega(TubeIntError):
    """Perturbative invariant coefficients are only available for omega = 1."""

    def __init__(self, omega: float):
        self.omega = omega
        super().__init__(f"perturbative invariant coefficients require omega=1, got {omega!r}")


class InsufficientSamples(TubeIntError):
    """A trajectory does not cover the requested window densely enough."""


class InsufficientWindows(TubeIntError):
    """Too few complete windows for a secular fit."""


class OutOfRange(TubeIntError):
    """Logistic seed outside [0, 1]."""

    def __init__(self, value: float):
        self.value = value
        super().__init__(f"logistic seed must lie in [0, 1], got {value!r}")


class MissingInput(TubeIntError):
    """A required input file does not exist."""
