"""Sub-command plugins registered on the main hardyprobe app."""
