import logging

logger = logging.getLogger(__name__)


def _register_generic(module_dict, module_name, module, override=False):
    if not override:
        if module_name in module_dict:
            logger.warning('{} has been in module_dict.'.format(module_name))
    module_dict[module_name] = module


class Registry(dict):
    '''
    A helper class for managing named strategies, it extends a dictionary
    and provides a register function.

    There're two ways of registering new entries:
    1): calling register function:
        def identity_signature(knowledge, object_id):
            ...
        DEDUP.register("identity", identity_signature)
    2): used as decorator when declaring the entry:
        @SUITE.register("table1")
        def table1_suite(seeds):
            ...

    Access of an entry is just like using a dictionary, eg:
        fn = DEDUP["identity"]
    '''

    def __init__(self, *args, **kwargs):
        super(Registry, self).__init__(*args, **kwargs)

    def register(self, module_name, module=None, override=False):
        # used as function call
        if module is not None:
            _register_generic(self, module_name, module, override)
            return

        # used as decorator
        def register_fn(fn):
            _register_generic(self, module_name, fn, override)
            return fn

        return register_fn

    def make(self, name):
        if name in self:
            return self[name]
        raise ValueError('{} is not support now.'.format(name))


# object signature functions used by knowledge deduplication
DEDUP = Registry()
# benchmark suites: seeds -> list of generator configs
SUITE = Registry()
