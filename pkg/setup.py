from setuptools import find_packages, setup

setup(
	name='sketch_rpca',
	packages=find_packages(include=['sketch_rpca', 'sketch_rpca.*']),
	version='0.1.0',
	description='Randomized robust subspace recovery from column and row sketches of outlier-corrupted data.',
	author='sketch_rpca developers',
	install_requires=[
		'joblib~=1.3.2',
		'loguru~=0.7.2',
		'numpy~=1.26.1',
		'pandas~=2.1.2',
		'scikit-learn~=1.4.1.post1',
		'scipy~=1.11.3',
		'setuptools~=68.0.0'
	],
	setup_requires=['pytest_runner==6.0.0'],
	tests_require=['pytest==7.4.2'],
	test_suite='tests',
	entry_points={'console_scripts': ['sketch-rpca=sketch_rpca.harness.cli:main']}
)
