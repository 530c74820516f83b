export interface ReportRow {
  name: string;
  spaces: number;
  usedHours: number;
  availableHours: number;
  percentUsed: number;
  patientsTreated: number;
  bottleneck: boolean;
}

export interface TypeCount {
  g: number;
  count: number;
}

export interface SubTypeCount {
  g: number;
  p: number;
  count: number;
}

export interface CohortResult {
  total: number;
  perType: TypeCount[];
  perSubType: SubTypeCount[];
  report: ReportRow[];
  totalRevenue: number;
  warnings: string[];
}

export interface FeasibilityVerdict {
  feasible: boolean;
  violations: { resource: string; excessHours: number }[];
  impliedCohort: CohortResult | null;
}

export interface BestFitResult {
  cohort: CohortResult;
  deviations: { target: string; unmet: number }[];
  objectiveValue: number;
  throughputMaximized: boolean;
}

export interface EvaluationResult {
  report: ReportRow[];
  flagged: string[];
}

export type TaskKind =
  | "basicTheatre"
  | "basicBeds"
  | "advanced"
  | "evaluateAllocation"
  | "feasibility"
  | "bestFit";

export interface TaskResult {
  kind: TaskKind;
  effectiveParameters: Record<string, unknown>;
  elapsedMs: number;
  result: CohortResult | FeasibilityVerdict | BestFitResult | EvaluationResult;
}

export interface SessionState {
  sessionId: string;
  projectName: string;
  config: {
    icuBeds: number;
    theatres: number;
    wards: { wardId: number; name: string; beds: number }[];
  };
  mss: {
    weeks: number;
    daysPerWeek: number;
    sessionsPerDay: number;
    sessionHours: number;
    totalSessions: number;
    theatreHours: number;
  };
  caseMix: Record<string, number>;
  subMix: { g: number; p: number; percent: number }[];
  sessionAssignments: Record<string, number>;
  unassignedSessions: number;
  targets: {
    type: Record<string, number>;
    sub: { g: number; p: number; target: number }[];
  };
  hasAllocation: boolean;
  types: { typeId: number; name: string }[];
  subTypes: { g: number; p: number; name: string }[];
  caseMixError: number | null;
  subMixErrors: Record<string, number>;
}

export interface FieldError {
  field: string;
  message: string;
}
