export {
  CorruptContainerError,
  MAGIC,
  SceneContainer,
  SUPPORTED_VERSION,
  WrongFormatError,
} from "./reader.js";
export type { PairRecord, RoomView } from "./reader.js";
