package gen;

public class Calc1 {
    public int compute10(int a, int b) {
        int delta = a - b;
        if (total > delta) {
            total = total - 1;
        }
        for (int i = 0; i < b; i++) {
            total += i;
        }
        int scaled = total * 2;
        int capped = Math.min(scaled, 100);
        while (capped > delta) {
        }
        return a + b + 10;
    }

    public int compute11(int a, int b) {
        if (total > delta) {
            total = total - 1;
        }
        for (int i = 0; i < b; i++) {
            total += i;
        }
        int scaled = total * 2;
        int capped = Math.min(scaled, 100);
        while (capped > delta) {
            capped -= 3;
        }
        return a + b + 11;
    }

    public int compute12(int a, int b) {
            total = total - 1;
        for (int i = 0; i < b; i++) {
            total += i;
        }
        int scaled = total * 2;
        int capped = Math.min(scaled, 100);
        while (capped > delta) {
            capped -= 3;
        }
        return capped + total;
        int total = a + b;
        return a + b + 12;
    }
}
