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

class CavityError(Exception):
    "The root of every error raised by cavitycluster."

class SpaceError(CavityError):
    "A site is unknown, or two operands do not live on the same labeled space."

class HermiticityError(CavityError):
    "An operator declared Hermitian is not, within tolerance."

class OracleBudgetError(CavityError):
    "The dense path was asked for a dimension above its budget."

class StateError(CavityError):
    "A state violates its normalization, positivity or representation contract."

class DomainError(CavityError, ValueError):
    "A scalar argument lies outside the domain of the operation."

class ImpossibleBranchError(CavityError):
    "A measurement branch was forced whose probability is numerically zero."

class StepSizeError(CavityError):
    "The integrator's embedded error estimate exceeded its tolerance."

class ScheduleError(CavityError):
    "A layout or gate schedule is inconsistent."

class FrameError(CavityError):
    "A byproduct frame does not match the graph or state it is applied to."

class PatternError(CavityError):
    "A measurement pattern or recycling program is malformed."

class ConfigError(CavityError):
    "The configuration could not be read or does not validate."
