export {
  CONTINUOUS,
  discrete,
  parseTabularText,
  schemaOf,
  toTabularText,
  validateColumns,
} from "./data.js";
export type { ColumnKind, ColumnSet } from "./data.js";

export { CliError, defaultCommand, runCli, runWithExternalScore } from "./cli.js";

export { BridgeSession } from "./bridge.js";
export type { Algorithm, ScoreCallback } from "./bridge.js";
