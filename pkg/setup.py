from setuptools import setup

setup(
    name='setbm',
    version='1.0.0',
    author='setbm contributors',
    packages=['setbm'],
    license='LICENSE.txt',
    description='Set-valued Brownian motion: simulation, gH difference and statistical verification.',
    long_description=open('README.rst').read(),
    long_description_content_type='text/x-rst',
    install_requires=[
        'numpy>=1.20',
        'scipy>=1.6',
        'pytz',
        'PyYAML',
    ],
    entry_points={
    'console_scripts': [
            # simulate, verify, distfn and ghdiff subcommands
            'setbm = setbm.cli:main',
            ],
    },
    package_data={
            'setbm': ['data/*'],
    },
    setup_requires=['pytest-runner'],
    tests_require=["pytest", 'pytest-cov', 'hypothesis'],
    python_requires='>=3.9',
    classifiers=[
        'Development Status :: 4 - Beta',
        'License :: OSI Approved :: MIT License',
        'Operating System :: POSIX',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
)
