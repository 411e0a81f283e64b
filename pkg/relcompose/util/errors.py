import sys
from collections import namedtuple

ERROR = 'error'
WARNING = 'warning'


class Diagnostic(namedtuple('Diagnostic', ['level', 'location', 'message'])):
    __slots__ = ()

    @classmethod
    def error(cls, location, message):
        return cls(ERROR, location, message)

    @classmethod
    def warning(cls, location, message):
        return cls(WARNING, location, message)

    @property
    def is_error(self):
        return self.level == ERROR

    def __str__(self):
        return '{}: {}: {}'.format(self.location, self.level, self.message)


def errors_only(diagnostics):
    return [d for d in diagnostics if d.is_error]


class RelcomposeError(ValueError):
    pass


class OntologyError(RelcomposeError):
    pass


class KnowledgeError(RelcomposeError):
    pass


class EngineError(RelcomposeError):
    pass


class GeneratorConfigError(RelcomposeError):
    pass


class FormatError(RelcomposeError):
    """A document could not be read; `diagnostics` lists every problem found."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super(FormatError, self).__init__('\n'.join(str(d) for d in self.diagnostics))


INPUT_ERROR_EXIT = 3


def report_error(error, stream=None):
    """Print an input error (diagnostics first) to stderr; returns the input-error exit code."""
    stream = stream or sys.stderr
    diagnostics = getattr(error, 'diagnostics', None)
    if diagnostics:
        for d in diagnostics:
            print(d, file=stream)
    else:
        print('error: {}'.format(error), file=stream)
    return INPUT_ERROR_EXIT
