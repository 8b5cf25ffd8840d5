#
# Copyright (c) 2024 The cavity-cluster contributors
#
# This program and the accompanying materials are made available under the
# terms of the Eclipse Public License 2.0 which is available at
# http://www.eclipse.org/legal/epl-2.0, or the Apache License, Version 2.0
# which is available at https://www.apache.org/licenses/LICENSE-2.0.
#
# SPDX-License-Identifier: EPL-2.0 OR Apache-2.0
#
# Runs the command line as a separate process, the way a user would: `python3 tests/cli_check.py`
from os import path
from subprocess import Popen, PIPE
import json
import sys
import time

root = path.dirname(path.dirname(path.realpath(__file__)))
tab = "\t"
TIMEOUT = 300

class Pyrun:
	def __init__(self, args) -> None:
		self.name = "cavity-cluster " + " ".join(args)
		print(f"starting {self.name}")
		self.process: Popen = Popen([sys.executable, "-m", "cavitycluster", *args], stdout=PIPE, stderr=PIPE, cwd=root)
		self.start = time.time()
		self.end = None
		self._stdout = None
		self._stderr = None
	def dbg(self):
		self.wait()
		print(f"{self.name} stdout:")
		print(f"{tab}{tab.join(self.stdout.splitlines(True))}")
		print(f"{self.name} stderr:")
		print(f"{tab}{tab.join(self.stderr.splitlines(True))}")
	def status(self, expecting=0, do_print=True):
		status = self.wait()
		formatted = f"{self.name}: returned {status} (expected {expecting}) - {self.time:.2}s"
		if do_print:
			print(formatted)
		return formatted if status != expecting else None
	def wait(self):
		if self._stdout is None:
			try:
				out, err = self.process.communicate(timeout=TIMEOUT)
			except Exception:
				self.process.kill()
				out, err = self.process.communicate()
			self._stdout, self._stderr = out.decode("utf8"), err.decode("utf8")
			self.end = time.time()
		return self.process.returncode
	@property
	def stdout(self):
		self.wait()
		return self._stdout
	@property
	def stderr(self):
		self.wait()
		return self._stderr
	@property
	def time(self):
		return None if self.end is None else (self.end - self.start)

errors = []

def check(args, expecting=0):
	run = Pyrun(args)
	failure = run.status(expecting)
	if failure:
		run.dbg()
		errors.append(failure)
	return run

gates = check(["--threads", "2", "gate-verify"])
if gates.stdout and json.loads(gates.stdout)["verified"] is not True:
	errors.append("gate-verify did not certify both gates")

check(["gate-verify", "--mediator-input", "zero", "--outcome", "1"], expecting=1)

resources = check(["resources", "--mode", "recycling"])
if resources.stdout and json.loads(resources.stdout)[0]["steps"] != 156:
	resources.dbg()
	errors.append("resources did not report 156 recycling steps")

sweep = check(["--threads", "2", "sweep-fidelity", "--grid", "1x5", "--points", "2", "--delta-min", "16", "--delta-max", "64"])
lines = sweep.stdout.splitlines()
if not lines or lines[0] != "delta_over_A,fidelity_mean,fidelity_postselected,noise_rate,seed" or len(lines) != 3:
	sweep.dbg()
	errors.append("sweep-fidelity did not print its table")

for demo in (["grover", "--marked", "1"], ["prep", "--theta", "0.7", "--phi", "1.9"], ["recycle", "--rounds", "2"]):
	check(["mbqc", *demo])

check(["mbqc", "grover", "--source", "fabricated", "--delta-off", "32"])
check(["validate-full-model", "--samples", "11"])
check(["resources", "--width", "0"], expecting=2)
check([], expecting=2)

if len(errors):
	message = f"Found {len(errors)} errors:\n\n" + "\n\n".join(errors)
	raise Exception(message)
else:
	print("Pass")
