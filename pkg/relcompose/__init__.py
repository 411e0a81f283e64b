from relcompose import core
from relcompose.core.engine import Composer, EngineConfig, search_composition

from relcompose import interface
from relcompose import util
from relcompose.util import registry
from relcompose.util.config import import_config

from relcompose import data
from relcompose.data.bundle import load_instance, save_instance
from relcompose.data.generator import GenConfig, generate_instance
