class GearboxError(Exception):
    """Base class of every error raised by this repository."""


class ConfigError(GearboxError, ValueError):
    pass


class GeometryError(GearboxError, ValueError):
    pass


class SignalError(GearboxError, ValueError):
    pass


class DomainError(GearboxError, ValueError):
    pass


class EstimationError(GearboxError, ValueError):
    pass


class ArtifactError(GearboxError):
    """Missing or corrupt upstream artifact. Always names the case."""

    def __init__(self, case, message):
        super(ArtifactError, self).__init__(f'[{case}] {message}')
        self.case = case
        self.message = message

    def __reduce__(self):
        return type(self), (self.case, self.message)


class SimulationDivergedError(GearboxError):
    def __init__(self, step, time, channel):
        super(SimulationDivergedError, self).__init__(
            f'non-finite state at step {step} (t = {time:.6g} s), first bad channel: {channel}')
        self.step = step
        self.time = time
        self.channel = channel

    def __reduce__(self):
        return type(self), (self.step, self.time, self.channel)
