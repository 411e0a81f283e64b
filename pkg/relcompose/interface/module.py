class ConfigModule(object):
    """Option holder built from a config dict.

    Subclasses fill defaults in `set_default_config`, the user dict is merged
    on top and every key becomes an attribute. Unknown keys are rejected.
    """

    def __init__(self, config=None):
        self._cfg = dict()
        self.set_default_config()
        self._update_config(config or dict())
        for k, v in self.config.items():
            self.__dict__[k] = v
        self.validate()

    def set_default_config(self):
        raise NotImplementedError

    def validate(self):
        pass

    def _update_config(self, new_config):
        unknown = sorted(set(new_config) - set(self._cfg))
        if unknown:
            raise ValueError('unknown option(s) for {}: {}'.format(type(self).__name__, ', '.join(unknown)))
        self._cfg.update(new_config)

    @property
    def config(self):
        return self._cfg

    def replace(self, **kwargs):
        cfg = dict(self.config)
        cfg.update(kwargs)
        return type(self)(cfg)

    def __eq__(self, other):
        return type(self) is type(other) and self.config == other.config

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        s = '[{}]\n'.format(type(self).__name__)
        for k, v in self.config.items():
            s += '{name} = {value}\n'.format(name=k, value=v)
        s += '[------]'
        return s
