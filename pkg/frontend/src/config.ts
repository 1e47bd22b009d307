/**
 * Service origin baked in at build time.
 *
 * The default empty string targets the origin the page was served from,
 * which is the common case: the prediction service mounts these static
 * assets itself. Point the UI at a remote service by rewriting this
 * constant before running the build.
 */
export const SERVICE_ORIGIN: string = "";
