import copy
import importlib
import importlib.util
import os


def import_config(config_name):
    """Load `config` from a python config file.

    Args:
        config_name: a path to a ``*.py`` file, or a module name under the
            ``config_demo`` package (e.g. ``'table1'``).

    Returns:
        a deep copy of the module-level ``config`` dict
    """
    if config_name.endswith('.py') or os.path.sep in config_name:
        if not os.path.exists(config_name):
            raise FileNotFoundError('config file {} does not exist'.format(config_name))
        module_name = os.path.splitext(os.path.basename(config_name))[0]
        spec = importlib.util.spec_from_file_location('relcompose_config_{}'.format(module_name), config_name)
        m = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(m)
    else:
        m = importlib.import_module(name='config_demo.{}'.format(config_name))
    if not hasattr(m, 'config'):
        raise ValueError('{} does not define `config`'.format(config_name))
    return copy.deepcopy(m.config)


def merge_config(base, override):
    """Recursively merge `override` into a copy of `base`; None values are skipped."""
    ret = copy.deepcopy(base)
    for k, v in override.items():
        if v is None:
            continue
        if isinstance(v, dict) and isinstance(ret.get(k), dict):
            ret[k] = merge_config(ret[k], v)
        else:
            ret[k] = v
    return ret
