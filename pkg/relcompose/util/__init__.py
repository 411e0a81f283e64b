from relcompose.util import registry
from relcompose.util.config import import_config
from relcompose.util.errors import Diagnostic, FormatError
