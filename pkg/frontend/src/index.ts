/**
 * Typed client for the wsoleval HTTP evaluation service.
 *
 * Score maps and masks travel as flat row-major value arrays with explicit
 * height/width, matching the service's wire format. All responses are
 * validated with zod before they reach callers.
 */
import axios, { AxiosInstance } from "axios";
import { z } from "zod";

/** Flat row-major grid of numbers, the wire format for maps and masks. */
export interface GridPayload {
  height: number;
  width: number;
  values: number[];
}

/** Axis-aligned box as half-open pixel bounds [x0, x1) x [y0, y1). */
export type Box = [number, number, number, number];

export type Normalization = "minmax" | "max" | "none";

export interface EvaluateBoxesOptions {
  deltas?: number[];
  gridSpacing?: number;
  exactThresholds?: boolean;
  connectivity?: 4 | 8;
  normalization?: Normalization;
  /** false reproduces the largest-component-only variant of the metric */
  allComponents?: boolean;
}

export interface EvaluateMasksOptions {
  ignoreMasks?: (GridPayload | null)[];
  gridSpacing?: number;
  exactThresholds?: boolean;
  normalization?: Normalization;
}

const DeltaMaxSchema = z.object({
  delta: z.number(),
  value: z.number(),
  tau_star: z.number(),
});

const EvaluateBoxesResponseSchema = z.object({
  value: z.number(),
  per_delta: z.array(DeltaMaxSchema),
  n_images: z.number().int(),
});

const EvaluateMasksResponseSchema = z.object({
  pxap: z.number(),
  thresholds: z.array(z.number()),
  precision: z.array(z.number()),
  recall: z.array(z.number()),
  n_images: z.number().int(),
});

const TrialSchema = z.object({
  trial_id: z.number().int(),
  method: z.string(),
  values: z.record(z.number()),
  seed: z.number().int(),
});

const SampleHparamsResponseSchema = z.object({ trials: z.array(TrialSchema) });

const KendallTauResponseSchema = z.object({ kendall_tau: z.number() });

const LemmaCheckResponseSchema = z.object({
  worlds_checked: z.number().int(),
  disagreements: z.number().int(),
  counterexamples: z.array(z.unknown()),
});

const HealthResponseSchema = z.object({
  status: z.string(),
  version: z.string(),
});

export type EvaluateBoxesResponse = z.infer<typeof EvaluateBoxesResponseSchema>;
export type EvaluateMasksResponse = z.infer<typeof EvaluateMasksResponseSchema>;
export type Trial = z.infer<typeof TrialSchema>;
export type LemmaCheckResponse = z.infer<typeof LemmaCheckResponseSchema>;

/** Build a GridPayload from a rectangular 2-D array. */
export function gridFromRows(rows: number[][]): GridPayload {
  const height = rows.length;
  if (height === 0) throw new Error("grid needs at least one row");
  const width = rows[0].length;
  const values: number[] = [];
  for (const row of rows) {
    if (row.length !== width) throw new Error("grid rows must share one width");
    values.push(...row);
  }
  return { height, width, values };
}

export class WsolevalClient {
  private readonly http: AxiosInstance;

  constructor(baseURL: string) {
    this.http = axios.create({ baseURL });
  }

  async health(): Promise<{ status: string; version: string }> {
    const res = await this.http.get("/health");
    return HealthResponseSchema.parse(res.data);
  }

  /**
   * Box localization accuracy: per delta, the best over thresholds of the
   * fraction of images whose estimated boxes reach IoU >= delta; the top-level
   * value averages those per-delta maxima.
   */
  async evaluateBoxes(
    scoreMaps: GridPayload[],
    gtBoxes: Box[][],
    options: EvaluateBoxesOptions = {},
  ): Promise<EvaluateBoxesResponse> {
    const res = await this.http.post("/evaluate/boxes", {
      score_maps: scoreMaps,
      gt_boxes: gtBoxes,
      ...(options.deltas !== undefined && { deltas: options.deltas }),
      ...(options.gridSpacing !== undefined && { grid_spacing: options.gridSpacing }),
      ...(options.exactThresholds !== undefined && { exact_thresholds: options.exactThresholds }),
      ...(options.connectivity !== undefined && { connectivity: options.connectivity }),
      ...(options.normalization !== undefined && { normalization: options.normalization }),
      ...(options.allComponents !== undefined && { all_components: options.allComponents }),
    });
    return EvaluateBoxesResponseSchema.parse(res.data);
  }

  /** Dataset-pooled pixel average precision with optional ignore regions. */
  async evaluateMasks(
    scoreMaps: GridPayload[],
    gtMasks: GridPayload[],
    options: EvaluateMasksOptions = {},
  ): Promise<EvaluateMasksResponse> {
    const res = await this.http.post("/evaluate/masks", {
      score_maps: scoreMaps,
      gt_masks: gtMasks,
      ...(options.ignoreMasks !== undefined && { ignore_masks: options.ignoreMasks }),
      ...(options.gridSpacing !== undefined && { grid_spacing: options.gridSpacing }),
      ...(options.exactThresholds !== undefined && { exact_thresholds: options.exactThresholds }),
      ...(options.normalization !== undefined && { normalization: options.normalization }),
    });
    return EvaluateMasksResponseSchema.parse(res.data);
  }

  /** Deterministic random-search trial configurations for a training method. */
  async sampleHparams(method: string, n = 30, seed = 0): Promise<Trial[]> {
    const res = await this.http.post("/hparams/sample", { method, n, seed });
    return SampleHparamsResponseSchema.parse(res.data).trials;
  }

  /** Kendall tau-b rank correlation between two score vectors. */
  async kendallTau(rankingA: number[], rankingB: number[]): Promise<number> {
    const res = await this.http.post("/analysis/kendall-tau", {
      ranking_a: rankingA,
      ranking_b: rankingB,
    });
    return KendallTauResponseSchema.parse(res.data).kendall_tau;
  }

  /** Exhaustive consistency check of the perfect-threshold criterion. */
  async checkLemma(maxCues = 4, posteriorGrid = 9, strict = true): Promise<LemmaCheckResponse> {
    const res = await this.http.post("/lemma/check", {
      max_cues: maxCues,
      posterior_grid: posteriorGrid,
      strict,
    });
    return LemmaCheckResponseSchema.parse(res.data);
  }
}
