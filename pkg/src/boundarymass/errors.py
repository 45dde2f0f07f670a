class InputError(ValueError):
    """
    User-supplied data is malformed: wrong shapes, non-symmetric tensors,
    invalid descriptors or grid headers.
    """


class DomainError(ValueError):
    """
    A point, radius or model lies outside the admissible region.
    """


class DegenerateLapseError(ValueError):
    """
    The lapse of a Killing development is not positive.
    """
    def __init__(self, point, value):
        self.point = point
        self.value = value
        ValueError.__init__(
            self, 'Lapse V={} is not positive at {}'.format(value, point))


class InvalidIsometryError(ValueError):
    """
    A map is not a boundary-preserving isometry of the model.
    """


class InvalidGaugeError(ValueError):
    """
    A gauge vector field is not tangent to the boundary.
    """


class StencilError(RuntimeError):
    """
    A finite-difference stencil leaves the chart on both sides.
    """
    def __init__(self, point, axis):
        self.point = point
        self.axis = axis
        RuntimeError.__init__(
            self,
            'Stencil along axis {} leaves the domain on both sides '
            'at {}'.format(axis, point))


class EvalError(RuntimeError):
    """
    A field produced non-finite values.
    """
    def __init__(self, point, name=None):
        self.point = point
        self.name = name
        RuntimeError.__init__(
            self,
            'Non-finite value of field {} at {}'.format(name or '?', point))


class SingularMetricError(RuntimeError):
    """
    A metric is singular or not positive definite.
    """
    def __init__(self, point):
        self.point = point
        RuntimeError.__init__(
            self, 'Metric is singular or indefinite at {}'.format(point))


class ConvergenceError(RuntimeError):
    """
    Successive extrapolants of a flux limit do not settle.
    """
    def __init__(self, radii, extrapolants, label=None):
        self.radii = list(radii)
        self.extrapolants = list(extrapolants)
        self.label = label
        RuntimeError.__init__(
            self,
            'Extrapolation of {} did not converge: radii={} '
            'extrapolants={}'.format(
                label or 'flux', self.radii, self.extrapolants))
