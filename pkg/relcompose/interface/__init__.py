from relcompose.interface.module import ConfigModule
