package app;

public class Parser {
    public int parseAmount(String text) {
        return Integer.parseInt(text);
    }

    public long parseMillis(String text) {
        String trimmed = text.trim();
        if (trimmed.endsWith("ms")) {
            trimmed = trimmed.substring(0, trimmed.length() - 2);
        }
        return Long.parseLong(trimmed.trim());
    }

    public boolean looksNumeric(String text) {
        for (int i = 0; i < text.length(); i++) {
            if (!Character.isDigit(text.charAt(i))) {
                return false;
            }
        }
        return text.length() > 0;
    }
}
