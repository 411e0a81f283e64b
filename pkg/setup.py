from setuptools import find_packages, setup

install_requires = [
    'numpy>=1.17',
    'tensorboardX',
    'lxml',
]
extras_require = {
    'test': ['pytest', 'networkx'],
}
setup(
    name='relcompose',
    version='0.1.0',
    description='Automatic composition of web services with relations between parameters and inference rules',
    keywords='web service composition semantic matching inference rules',
    packages=find_packages(exclude=('tests', 'tests.*')),
    classifiers=[
        'Development Status :: 4 - Beta',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Topic :: Utilities',
    ],
    license='GPLv3',
    python_requires='>=3.6',
    setup_requires=[],
    tests_require=['pytest', 'networkx'],
    install_requires=install_requires,
    extras_require=extras_require,
    entry_points={
        'console_scripts': ['relcompose=relcompose.cli:main'],
    },
    zip_safe=False)
