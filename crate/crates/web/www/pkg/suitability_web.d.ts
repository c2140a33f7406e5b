/* tslint:disable */
/* eslint-disable */

/**
 * Full analytic report for one link setting.
 */
export function analyze(mu: number, separation_ps: number, sigma_ps: number, delta_t_ps: number): string;

/**
 * Side-channel leak ratio and mode overlap against arrival-time separation
 * on `points` values in `[0, max_separation_ps]`.
 */
export function leakage_curves(mu: number, sigma_ps: number, delta_t_ps: number, max_separation_ps: number, points: number): string;

/**
 * Monte Carlo exchange with the combined PNS and timing attack.
 */
export function simulate(mu: number, separation_ps: number, sigma_ps: number, delta_t_ps: number, pulses: number, seed: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly analyze: (a: number, b: number, c: number, d: number) => [number, number];
    readonly leakage_curves: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly simulate: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
